use super::*;
use crate::modeset::ModeSet;
use crate::operator::Ladder::{Annihilate, Create};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn spec(n: usize, d: usize) -> ModeSpec {
    ModeSpec::new(n, d).unwrap()
}

#[test]
fn mode_spec_validation() {
    assert!(ModeSpec::new(0, 4).is_err());
    assert!(ModeSpec::new(2, 1).is_err());
    assert!(ModeSpec::new(64, 2).is_err());
    assert_eq!(spec(3, 4).dimension(), 64);
}

#[test]
fn basis_states() {
    let s = make_basis_state(spec(1, 4), &[2]).unwrap();
    assert_eq!(s.headroom(), 1);
    let amps = s.amplitudes().unwrap();
    assert_eq!(amps[2], c(1.0, 0.0));
    assert!((s.trace() - 1.0).abs() < 1e-15);

    let vac = make_basis_state(spec(2, 3), &[0, 0]).unwrap();
    assert_eq!(vac.amplitudes().unwrap()[0], c(1.0, 0.0));
    assert_eq!(vac.headroom(), 2);

    assert_eq!(
        make_basis_state(spec(2, 3), &[0, 3]),
        Err(Error::CutoffViolation {
            mode: 1,
            occupation: 3,
            cutoff: 3
        })
    );
}

#[test]
fn ghz_amplitudes() {
    let s = make_ghz_like(spec(2, 4), c(1.0, 0.0)).unwrap();
    let amps = s.amplitudes().unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!((amps[0] - c(h, 0.0)).norm() < 1e-15);
    assert!((amps[5] - c(h, 0.0)).norm() < 1e-15);

    let s3 = make_ghz_like(spec(3, 3), c(0.0, 1.0)).unwrap();
    let amps = s3.amplitudes().unwrap();
    assert!((amps[13] - c(0.0, h)).norm() < 1e-15);

    // ⟨GHZ₂| a₁ a₂ |GHZ₂⟩ through explicit ladder applications
    let s = make_ghz_like(spec(2, 4), c(1.0, 0.0)).unwrap();
    let t = apply_mode_op(&apply_mode_op(&s, 0, Annihilate).unwrap(), 1, Annihilate).unwrap();
    let overlap: C64 = s
        .amplitudes()
        .unwrap()
        .iter()
        .zip(t.amplitudes().unwrap())
        .map(|(a, b)| a.conj() * b)
        .sum();
    assert!((overlap - c(0.5, 0.0)).norm() < 1e-15);
}

#[test]
fn coherent_moments() {
    let vac = make_coherent_product(spec(1, 6), &[c(0.0, 0.0)], 0).unwrap();
    assert_eq!(vac.amplitudes().unwrap()[0], c(1.0, 0.0));

    let s = make_coherent_product(spec(1, 20), &[c(0.5, 0.0)], 2).unwrap();
    let n = s.expectation(&[(0, Create), (0, Annihilate)]).unwrap();
    assert!((n.re - 0.25).abs() < 1e-8);

    let s = make_coherent_product(spec(2, 20), &[c(1.0, 0.0), c(1.0, 0.0)], 2).unwrap();
    let m = s.expectation(&[(0, Annihilate), (1, Annihilate)]).unwrap();
    assert!((m - c(1.0, 0.0)).norm() < 1e-8);

    match make_coherent_product(spec(2, 6), &[c(0.1, 0.0), c(3.0, 0.0)], 0) {
        Err(Error::TruncationBudget { mode, .. }) => assert_eq!(mode, 1),
        other => panic!("expected truncation error, got {other:?}"),
    }
}

#[test]
fn two_mode_squeezed_moments() {
    let vac = make_two_mode_squeezed(spec(2, 4), 0.0, 0).unwrap();
    assert_eq!(vac.amplitudes().unwrap()[0], c(1.0, 0.0));

    let r: f64 = 0.3;
    let s = make_two_mode_squeezed(spec(2, 12), r, 2).unwrap();
    let m = s.expectation(&[(0, Annihilate), (1, Annihilate)]).unwrap();
    assert!((m.re - r.cosh() * r.sinh()).abs() < 1e-6);
    let pt = partial_transpose_min_eig(&s, ModeSet::from_modes(&[1]).unwrap()).unwrap();
    assert!(pt.min_eigenvalue < 0.0);

    assert!(make_two_mode_squeezed(spec(2, 6), 1.0, 0).is_err());
}

#[test]
fn random_states() {
    let a = random_state(spec(2, 4), StateKind::Pure, 1, 11).unwrap();
    let b = random_state(spec(2, 4), StateKind::Pure, 1, 11).unwrap();
    assert_eq!(a, b);

    let mixed = random_state(spec(2, 3), StateKind::Mixed, 0, 3).unwrap();
    let (min, _) = eigen::min_eigenpair(mixed.density_matrix().as_ref()).unwrap();
    assert!(min >= -1e-12);
    mixed.validate().unwrap();

    let s = random_state(spec(2, 4), StateKind::Pure, 2, 5).unwrap();
    let full = Lattice { side: 4, n: 2 };
    for (idx, a) in s.amplitudes().unwrap().iter().enumerate() {
        if full.digits(idx).iter().any(|&m| m > 1) {
            assert_eq!(*a, c(0.0, 0.0));
        }
    }
}

#[test]
fn ladder_action() {
    let two = make_basis_state(spec(1, 4), &[2]).unwrap();
    let out = apply_mode_op(&two, 0, Annihilate).unwrap();
    assert!((out.amplitudes().unwrap()[1] - c(2f64.sqrt(), 0.0)).norm() < 1e-15);

    let vac = make_basis_state(spec(1, 4), &[0]).unwrap();
    let out = apply_mode_op(&vac, 0, Annihilate).unwrap();
    assert_eq!(out.trace(), 0.0);

    let one = make_basis_state(spec(1, 4), &[1]).unwrap();
    let up = apply_mode_op(&one, 0, Create).unwrap();
    assert_eq!(up.headroom(), 1);
    let back = apply_mode_op(&up, 0, Annihilate).unwrap();
    assert!((back.amplitudes().unwrap()[1] - c(2.0, 0.0)).norm() < 1e-15);

    let top = make_basis_state(spec(1, 4), &[3]).unwrap();
    assert!(matches!(apply_mode_op(&top, 0, Create), Err(Error::Headroom { .. })));
}

#[test]
fn mixed_ladder_action_matches_pure() {
    let pure = random_state(spec(2, 4), StateKind::Pure, 1, 2).unwrap();
    let psi = pure.support_amplitudes().unwrap().to_vec();
    let rho = Mat::from_fn(psi.len(), psi.len(), |i, j| psi[i] * psi[j].conj());
    let mixed = DenseState::mixed_on_support(pure.spec(), 1, rho).unwrap();
    let a = apply_mode_op(&pure, 1, Create).unwrap();
    let b = apply_mode_op(&mixed, 1, Create).unwrap();
    let (ra, rb) = (a.density_matrix(), b.density_matrix());
    for j in 0..ra.ncols() {
        for i in 0..ra.nrows() {
            assert!((ra[(i, j)] - rb[(i, j)]).norm() < 1e-14);
        }
    }
}

#[test]
fn word_expectations() {
    let vac = make_basis_state(spec(1, 3), &[0]).unwrap();
    assert_eq!(vac.expectation(&[(0, Create), (0, Annihilate)]).unwrap(), c(0.0, 0.0));
    let one = make_basis_state(spec(1, 3), &[1]).unwrap();
    assert_eq!(one.expectation(&[(0, Create), (0, Annihilate)]).unwrap(), c(1.0, 0.0));
    let ghz = make_ghz_like(spec(3, 3), c(1.0, 0.0)).unwrap();
    let v = ghz
        .expectation(&[(0, Annihilate), (1, Annihilate), (2, Annihilate)])
        .unwrap();
    assert!((v - c(0.5, 0.0)).norm() < 1e-15);

    // the word a a† needs one unit of headroom
    let top = make_basis_state(spec(1, 3), &[2]).unwrap();
    assert!(matches!(
        top.expectation(&[(0, Annihilate), (0, Create)]),
        Err(Error::Headroom { .. })
    ));
}

#[test]
fn partial_transpose_examples() {
    let i1 = ModeSet::from_modes(&[1]).unwrap();
    let ghz = make_ghz_like(spec(2, 2), c(1.0, 0.0)).unwrap();
    let pt = partial_transpose_min_eig(&ghz, i1).unwrap();
    assert!((pt.min_eigenvalue + 0.5).abs() < 1e-10);
    let norm: f64 = pt.witness.iter().map(|x| x.norm_sqr()).sum();
    assert!((norm - 1.0).abs() < 1e-12);

    let coh = make_coherent_product(spec(2, 10), &[c(0.4, 0.1), c(-0.2, 0.3)], 1).unwrap();
    for modes in [&[0usize][..], &[1]] {
        let pt = partial_transpose_min_eig(&coh, ModeSet::from_modes(modes).unwrap()).unwrap();
        assert!(pt.min_eigenvalue >= -1e-10);
    }

    assert!(matches!(
        partial_transpose_min_eig(&ghz, ModeSet::empty()),
        Err(Error::TrivialBipartition(_))
    ));
    assert!(matches!(
        partial_transpose_min_eig(&ghz, ModeSet::all(2)),
        Err(Error::TrivialBipartition(_))
    ));
}

#[test]
fn from_amplitudes_infers_headroom() {
    let full = Lattice { side: 5, n: 2 };
    let mut amps = vec![c(0.0, 0.0); full.len()];
    amps[full.index(&[0, 2])] = c(1.0, 0.0);
    amps[full.index(&[1, 0])] = c(0.0, 1.0);
    let s = DenseState::from_amplitudes(spec(2, 5), &amps).unwrap();
    assert_eq!(s.headroom(), 2);
    let back = s.amplitudes().unwrap();
    assert!((back[full.index(&[1, 0])] - c(0.0, std::f64::consts::FRAC_1_SQRT_2)).norm() < 1e-15);
}
