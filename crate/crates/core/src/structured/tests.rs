use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::fock::{eigen, make_basis_state};
use Ladder::{Annihilate, Create};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn closed_form_matrix_elements() {
    let a = NormalOrderedPoly::from_operator(&ModeOperator::annihilate());
    let half = PrimitiveKet::Coherent(c(0.5, 0.0));
    assert!((single_mode_matrix_element(half, &a, half) - c(0.5, 0.0)).norm() < 1e-15);

    let aad = normal_order(&[Annihilate, Create]);
    let vac = PrimitiveKet::Number(0);
    assert_eq!(single_mode_matrix_element(vac, &aad, vac), c(1.0, 0.0));

    let n = normal_order(&[Create, Annihilate]);
    let two = PrimitiveKet::Number(2);
    assert!((single_mode_matrix_element(two, &n, two) - c(2.0, 0.0)).norm() < 1e-15);

    // ⟨1|a†|0⟩ through the adjoint branch
    let ad = normal_order(&[Create]);
    assert_eq!(single_mode_matrix_element(PrimitiveKet::Number(1), &ad, vac), c(1.0, 0.0));
}

#[test]
fn overlaps_against_dense_amplitudes() {
    let g = c(0.3, -0.7);
    let dense = crate::fock::coherent_amplitudes(g, 30);
    for m in 0..6 {
        assert!((overlap(PrimitiveKet::Number(m), PrimitiveKet::Coherent(g)) - dense[m]).norm() < 1e-15);
    }
    let b = c(-0.2, 0.4);
    let db = crate::fock::coherent_amplitudes(b, 30);
    let direct: C64 = db.iter().zip(&dense).map(|(x, y)| x.conj() * y).sum();
    assert!((overlap(PrimitiveKet::Coherent(b), PrimitiveKet::Coherent(g)) - direct).norm() < 1e-14);
}

#[test]
fn ghz_product_moment() {
    for n in 2..6 {
        let ghz = make_number_cat(n, ModeSet::empty(), c(1.0, 0.0)).unwrap();
        let word: Vec<_> = (0..n).map(|k| (k, Annihilate)).collect();
        assert!((structured_moment(&ghz, &word).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
    }
}

#[test]
fn vacuum_matches_dense() {
    let vac = StructuredState::new(vec![(c(1.0, 0.0), vec![PrimitiveKet::Number(0); 2])]).unwrap();
    let dense = make_basis_state(ModeSpec::new(2, 5).unwrap(), &[0, 0]).unwrap();
    let word = [(0, Annihilate), (1, Create), (0, Create), (1, Annihilate), (0, Annihilate)];
    assert_eq!(structured_moment(&vac, &word).unwrap(), dense.expectation(&word).unwrap());
    let word = [(1, Annihilate), (1, Create)];
    assert_eq!(structured_moment(&vac, &word).unwrap(), c(1.0, 0.0));
}

fn random_structured(rng: &mut ChaCha8Rng, n: usize) -> StructuredState {
    let n_terms = rng.random_range(1..4);
    let terms = (0..n_terms)
        .map(|_| {
            let coef = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let factors = (0..n)
                .map(|_| {
                    if rng.random_bool(0.5) {
                        PrimitiveKet::Number(rng.random_range(0..3))
                    } else {
                        PrimitiveKet::Coherent(c(rng.random_range(-0.8..0.8), rng.random_range(-0.8..0.8)))
                    }
                })
                .collect();
            (coef, factors)
        })
        .collect();
    StructuredState::new(terms).unwrap()
}

#[test]
fn random_coherent_states_agree_with_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let spec = ModeSpec::new(3, 20).unwrap();
    for _ in 0..10 {
        let s = random_structured(&mut rng, 3);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        let d = s.to_dense(spec, 4).unwrap();
        for _ in 0..20 {
            let len = rng.random_range(0..5);
            let word: Vec<(usize, Ladder)> = (0..len)
                .map(|_| (rng.random_range(0..3), if rng.random_bool(0.5) { Create } else { Annihilate }))
                .collect();
            let a = structured_moment(&s, &word).unwrap();
            let b = d.expectation(&word).unwrap();
            assert!((a - b).norm() < 1e-8, "{word:?}: {a} vs {b}");
        }
    }
}

#[test]
fn gram_matrix_is_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let s = random_structured(&mut rng, 2);
        let (min, _) = eigen::min_eigenpair(s.gram_matrix().as_ref()).unwrap();
        assert!(min >= -1e-10);
    }
}

#[test]
fn cat_family() {
    let vac = make_cat_family(1, c(1e-9, 0.0), 1).unwrap();
    let d = vac.to_dense(ModeSpec::new(1, 4).unwrap(), 0).unwrap();
    assert!((d.amplitudes().unwrap()[0].norm() - 1.0).abs() < 1e-12);

    let odd = make_cat_family(2, c(1.0, 0.0), -1).unwrap();
    assert!((odd.norm_sqr() - 1.0).abs() < 1e-12);
    for (n, alpha) in [(10, 0.05), (10, 0.5), (3, 2.0), (1, 0.01)] {
        for sign in [1, -1] {
            let s = make_cat_family(n, c(alpha, 0.0), sign).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12, "n={n} alpha={alpha} sign={sign}");
        }
    }
    assert!(matches!(
        make_cat_family(2, c(0.0, 0.0), -1),
        Err(Error::DegenerateNormalization(_))
    ));
    assert!(make_cat_family(2, c(1.0, 0.0), 0).is_err());
}

#[test]
fn underflowing_terms_are_dropped() {
    let s = StructuredState::new(vec![
        (c(1.0, 0.0), vec![PrimitiveKet::Number(0)]),
        (c(1e-310, 0.0), vec![PrimitiveKet::Number(1)]),
    ])
    .unwrap();
    assert_eq!(s.terms().len(), 1);
}

#[test]
fn normal_order_reproduces_dense_words() {
    // dense single-mode matrices at d = 12 against the reordered polynomial
    let d = 12;
    let words: [&[Ladder]; 4] = [
        &[Annihilate, Annihilate, Create, Create],
        &[Create, Annihilate, Annihilate, Create],
        &[Annihilate, Create, Annihilate, Create, Create],
        &[Annihilate, Annihilate, Annihilate, Create],
    ];
    for word in words {
        let poly = normal_order(word);
        let spec = ModeSpec::new(1, d).unwrap();
        for m in 0..(d - 3) {
            for k in 0..(d - 3) {
                let op = ModeOperator::word(word.to_vec());
                let bra = make_basis_state(spec, &[m]).unwrap();
                let ket = make_basis_state(spec, &[k]).unwrap();
                // ⟨m|W|k⟩ via the dense ket action
                let mut state = ket;
                for &l in word.iter().rev() {
                    state = crate::fock::apply_mode_op(&state, 0, l).unwrap();
                }
                let dense: C64 = bra
                    .amplitudes()
                    .unwrap()
                    .iter()
                    .zip(state.amplitudes().unwrap())
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let exact = single_mode_matrix_element(PrimitiveKet::Number(m), &poly, PrimitiveKet::Number(k));
                assert!((dense - exact).norm() < 1e-10, "{op:?} {m} {k}");
            }
        }
    }
}
