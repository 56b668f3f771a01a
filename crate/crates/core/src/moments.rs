//! Matrices of moments for a bipartition `I` and their principal minors.
//!
//! Rows are labelled by multi-index pairs `(k, l)` and columns by `(p, q)`.
//! The entry for a mode inside `I` is `b†^q b^p b†^k b^l`; outside `I` it is
//! `b†^l b^k b†^p b^q`. If the transposed state is positive every principal
//! minor is nonnegative, so a negative minor certifies a negative partial
//! transpose across `I`.

use faer::Mat;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::cfrd::ModeTransform;
use crate::error::{Error, Result};
use crate::modeset::ModeSet;
use crate::operator::{ModeOperator, MomentSource};

/// Determinants below `-NEGATIVITY_THRESHOLD` count as negative.
pub const NEGATIVITY_THRESHOLD: f64 = 1e-9;
pub const DEFAULT_ORDER: usize = 2;
pub const DEFAULT_MAX_MINOR: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MomentIndex {
    pub k: Vec<usize>,
    pub l: Vec<usize>,
}

impl MomentIndex {
    pub fn zero(n_modes: usize) -> Self {
        Self {
            k: vec![0; n_modes],
            l: vec![0; n_modes],
        }
    }

    pub fn degree(&self) -> usize {
        self.k.iter().chain(&self.l).sum()
    }

    fn key(&self) -> (usize, Vec<usize>) {
        (self.degree(), self.k.iter().chain(&self.l).copied().collect())
    }
}

/// All `(k, l)` of total degree at most `order`, graded, then lexicographic on `(k, l)`.
pub fn index_list(n_modes: usize, order: usize) -> Vec<MomentIndex> {
    fn fill(slots: usize, budget: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 0 {
            out.push(prefix.clone());
            return;
        }
        for x in 0..=budget {
            prefix.push(x);
            fill(slots - 1, budget - x, prefix, out);
            prefix.pop();
        }
    }
    let mut raw = Vec::new();
    fill(2 * n_modes, order, &mut Vec::new(), &mut raw);
    let mut indices: Vec<MomentIndex> = raw
        .into_iter()
        .map(|v| MomentIndex {
            k: v[..n_modes].to_vec(),
            l: v[n_modes..].to_vec(),
        })
        .collect();
    indices.sort_by_key(|i| i.key());
    indices
}

fn mode_word(t: &ModeTransform, mode: usize, transposed: bool, row: &MomentIndex, col: &MomentIndex) -> ModeOperator {
    let b = t.b(mode);
    let bd = t.b_dagger(mode);
    let (k, l, p, q) = (row.k[mode] as u32, row.l[mode] as u32, col.k[mode] as u32, col.l[mode] as u32);
    let parts = if transposed {
        [bd.pow(q), b.pow(p), bd.pow(k), b.pow(l)]
    } else {
        [bd.pow(l), b.pow(k), bd.pow(p), b.pow(q)]
    };
    parts.iter().skip(1).fold(parts[0].clone(), |acc, x| &acc * x)
}

/// A single entry `M^I_{st}` in the frame of `transform`.
pub fn moment_entry<S: MomentSource + ?Sized>(
    state: &S,
    bipartition: ModeSet,
    transform: &ModeTransform,
    row: &MomentIndex,
    col: &MomentIndex,
) -> Result<C64> {
    let n = state.n_modes();
    if !bipartition.fits(n) {
        return Err(Error::InvalidArgument(format!(
            "bipartition {:?} does not fit {n} modes",
            bipartition.modes()
        )));
    }
    for idx in [row, col] {
        if idx.k.len() != n || idx.l.len() != n {
            return Err(Error::InvalidArgument(format!("moment index has the wrong length for {n} modes")));
        }
    }
    if transform.u.len() != n {
        return Err(Error::InvalidArgument("mode transform does not match the state".into()));
    }
    let factors: Vec<ModeOperator> = (0..n)
        .map(|mode| mode_word(transform, mode, bipartition.contains(mode), row, col))
        .collect();
    state.product_expectation(&factors)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatrix {
    pub bipartition: ModeSet,
    pub order: usize,
    pub indices: Vec<MomentIndex>,
    pub entries: Mat<C64>,
}

impl MomentMatrix {
    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    pub fn position(&self, index: &MomentIndex) -> Option<usize> {
        self.indices.iter().position(|i| i == index)
    }
}

/// The matrix restricted to an explicit list of indices.
pub fn build_moment_submatrix<S: MomentSource + ?Sized>(
    state: &S,
    bipartition: ModeSet,
    transform: &ModeTransform,
    indices: Vec<MomentIndex>,
) -> Result<MomentMatrix> {
    let m = indices.len();
    let mut entries = Mat::<C64>::zeros(m, m);
    for (i, row) in indices.iter().enumerate() {
        for (j, col) in indices.iter().enumerate() {
            entries[(i, j)] = moment_entry(state, bipartition, transform, row, col)?;
        }
    }
    let order = indices.iter().map(MomentIndex::degree).max().unwrap_or(0);
    Ok(MomentMatrix {
        bipartition,
        order,
        indices,
        entries,
    })
}

pub fn build_moment_matrix<S: MomentSource + ?Sized>(
    state: &S,
    bipartition: ModeSet,
    transform: &ModeTransform,
    order: usize,
) -> Result<MomentMatrix> {
    let mut m = build_moment_submatrix(state, bipartition, transform, index_list(state.n_modes(), order))?;
    m.order = order;
    Ok(m)
}

/// Row whose diagonal entry is `⟨∏N_k⟩` and whose entry against the identity row is `⟨∏B_k(s_k)⟩`.
pub fn product_number_index(n_modes: usize) -> MomentIndex {
    MomentIndex {
        k: vec![0; n_modes],
        l: vec![1; n_modes],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinorReport {
    pub subset: Vec<usize>,
    pub determinant: f64,
    /// Rows of `[re, im]` pairs.
    #[serde(serialize_with = "serialize_mat", deserialize_with = "deserialize_mat")]
    pub matrix_slice: Mat<C64>,
}

fn serialize_mat<S: serde::Serializer>(m: &Mat<C64>, serializer: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<C64>> = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect();
    rows.serialize(serializer)
}

fn deserialize_mat<'de, D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Mat<C64>, D::Error> {
    let rows = Vec::<Vec<C64>>::deserialize(deserializer)?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(serde::de::Error::custom("matrix slice must be square"));
    }
    Ok(Mat::from_fn(n, n, |i, j| rows[i][j]))
}

pub fn principal_minor(matrix: &MomentMatrix, subset: &[usize]) -> Result<MinorReport> {
    if subset.is_empty() {
        return Err(Error::InvalidArgument("a principal minor needs a nonempty subset".into()));
    }
    if let Some(&bad) = subset.iter().find(|&&i| i >= matrix.dim()) {
        return Err(Error::InvalidArgument(format!(
            "index {bad} outside a {0}x{0} matrix",
            matrix.dim()
        )));
    }
    let m = subset.len();
    let slice = Mat::from_fn(m, m, |i, j| matrix.entries[(subset[i], subset[j])]);
    let det = match m {
        1 => slice[(0, 0)],
        2 => slice[(0, 0)] * slice[(1, 1)] - slice[(0, 1)] * slice[(1, 0)],
        _ => slice.determinant(),
    };
    // Hadamard's bound sets the scale of rounding in the determinant
    let hadamard: f64 = (0..m)
        .map(|i| (0..m).map(|j| slice[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .product();
    let scale = det.norm().max(hadamard);
    if det.im.abs() > NEGATIVITY_THRESHOLD * scale {
        return Err(Error::Numerical(format!(
            "principal minor {subset:?} has imaginary part {:e} (magnitude {scale:e})",
            det.im
        )));
    }
    Ok(MinorReport {
        subset: subset.to_vec(),
        determinant: det.re,
        matrix_slice: slice,
    })
}

/// Lexicographic `r`-subsets of `0..n`.
fn combinations(n: usize, r: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = (r <= n).then(|| (0..r).collect());
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let next = current.as_mut().unwrap();
        let mut i = r;
        loop {
            if i == 0 {
                current = None;
                break;
            }
            i -= 1;
            if next[i] < n - r + i {
                next[i] += 1;
                for j in (i + 1)..r {
                    next[j] = next[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

/// First principal minor below `-NEGATIVITY_THRESHOLD`, smallest subsets first.
pub fn find_negative_minor(matrix: &MomentMatrix, max_size: usize) -> Result<Option<MinorReport>> {
    if max_size > matrix.dim() {
        return Err(Error::InvalidArgument(format!(
            "max minor size {max_size} exceeds the matrix dimension {}",
            matrix.dim()
        )));
    }
    for size in 1..=max_size {
        for subset in combinations(matrix.dim(), size) {
            let minor = principal_minor(matrix, &subset)?;
            if minor.determinant < -NEGATIVITY_THRESHOLD {
                return Ok(Some(minor));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfrd::{cfrd_evaluate, mode_transform, QuadratureSettings};
    use crate::fock::{make_basis_state, make_coherent_product, make_ghz_like, make_two_mode_squeezed, ModeSpec};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn frame(n: usize) -> ModeTransform {
        ModeTransform {
            u: vec![c(1.0, 0.0); n],
            v: vec![c(0.0, 0.0); n],
        }
    }

    #[test]
    fn graded_lexicographic_order() {
        let idx = index_list(1, 2);
        let flat: Vec<(usize, usize)> = idx.iter().map(|i| (i.k[0], i.l[0])).collect();
        assert_eq!(flat, vec![(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]);
        assert_eq!(index_list(2, 2).len(), 15);
        assert_eq!(index_list(4, 2).len(), 45);
    }

    #[test]
    fn combinations_are_lexicographic() {
        let all: Vec<_> = combinations(4, 2).collect();
        assert_eq!(all, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(combinations(3, 0).count(), 1);
        assert_eq!(combinations(2, 3).count(), 0);
    }

    #[test]
    fn entry_examples() {
        let one = make_basis_state(ModeSpec::new(1, 4).unwrap(), &[1]).unwrap();
        let zero = MomentIndex::zero(1);
        let e = moment_entry(&one, ModeSet::empty(), &frame(1), &zero, &zero).unwrap();
        assert_eq!(e, c(1.0, 0.0));
        let row = MomentIndex { k: vec![0], l: vec![1] };
        let e = moment_entry(&one, ModeSet::empty(), &frame(1), &row, &row).unwrap();
        assert!((e - c(1.0, 0.0)).norm() < 1e-15);

        // GHZ₂ cross moment: M₀ₜ for I = {1} is ⟨a₀ a₁†⟩, and for I = ∅ it is ⟨a₀ a₁⟩
        let ghz = make_ghz_like(ModeSpec::new(2, 4).unwrap(), c(1.0, 0.0)).unwrap();
        let t = product_number_index(2);
        let e = moment_entry(&ghz, ModeSet::empty(), &frame(2), &MomentIndex::zero(2), &t).unwrap();
        assert!((e - c(0.5, 0.0)).norm() < 1e-15);
        let e = moment_entry(&ghz, ModeSet::from_mask(2), &frame(2), &MomentIndex::zero(2), &t).unwrap();
        assert!(e.norm() < 1e-15);
    }

    #[test]
    fn vacuum_and_coherent_matrices() {
        let vac = make_basis_state(ModeSpec::new(2, 4).unwrap(), &[0, 0]).unwrap();
        let m = build_moment_matrix(&vac, ModeSet::from_mask(1), &frame(2), 1).unwrap();
        assert_eq!(m.entries[(0, 0)], c(1.0, 0.0));
        // number-moment diagonal entries vanish; b b† ones do not
        for (i, idx) in m.indices.iter().enumerate().skip(1) {
            let expected = if idx.k.iter().all(|&x| x == 0) { 0.0 } else { 1.0 };
            assert_eq!(m.entries[(i, i)], c(expected, 0.0));
        }
        assert!(find_negative_minor(&m, 3).unwrap().is_none());

        let alpha = c(0.7, 0.2);
        let coh = make_coherent_product(ModeSpec::new(1, 20).unwrap(), &[alpha], 2).unwrap();
        let m = build_moment_matrix(&coh, ModeSet::empty(), &frame(1), 1).unwrap();
        let r = principal_minor(&m, &[0, 1]).unwrap();
        assert!(r.determinant.abs() < 1e-9);
        assert!((m.entries[(0, 1)] - alpha).norm() < 1e-9 || (m.entries[(0, 1)] - alpha.conj()).norm() < 1e-9);
        assert!((principal_minor(&m, &[0]).unwrap().determinant - 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_mode_squeezed_has_negative_minor() {
        let st = make_two_mode_squeezed(ModeSpec::new(2, 16).unwrap(), 0.3, 4).unwrap();
        let m = build_moment_matrix(&st, ModeSet::from_mask(2), &frame(2), 2).unwrap();
        let hit = find_negative_minor(&m, 2).unwrap().expect("negative minor");
        assert!(hit.determinant < -NEGATIVITY_THRESHOLD);
        assert_eq!(hit.subset.len(), 2);
        // the trivial bipartitions certify positivity only
        for bip in [ModeSet::empty(), ModeSet::all(2)] {
            let m = build_moment_matrix(&st, bip, &frame(2), 2).unwrap();
            assert!(find_negative_minor(&m, 3).unwrap().is_none());
        }
    }

    #[test]
    fn ghz2_needs_a_three_by_three_minor() {
        let ghz = make_ghz_like(ModeSpec::new(2, 6).unwrap(), c(1.0, 0.0)).unwrap();
        let m = build_moment_matrix(&ghz, ModeSet::from_mask(2), &frame(2), 2).unwrap();
        // the D^I pair gives ⟨N₀N₁⟩ − |⟨a₀a₁†⟩|² = 1/2, and no 2×2 minor is negative
        assert!(find_negative_minor(&m, 2).unwrap().is_none());
        let hit = find_negative_minor(&m, 3).unwrap().unwrap();
        assert!((hit.determinant + 0.125).abs() < 1e-12);
        let rows: Vec<_> = hit.subset.iter().map(|&i| (m.indices[i].k.clone(), m.indices[i].l.clone())).collect();
        assert_eq!(
            rows,
            vec![(vec![0, 1], vec![0, 1]), (vec![0, 1], vec![1, 0]), (vec![1, 0], vec![1, 0])]
        );
    }

    #[test]
    fn minor_d_matches_cfrd() {
        let st = make_two_mode_squeezed(ModeSpec::new(2, 16).unwrap(), 0.4, 4).unwrap();
        let s = QuadratureSettings::new(vec![0.3, -0.5], vec![0.2, -0.4], vec![1, -1]).unwrap();
        let report = cfrd_evaluate(&st, &s).unwrap();
        let idx = vec![MomentIndex::zero(2), product_number_index(2)];
        let m = build_moment_submatrix(&st, s.bipartition(), &mode_transform(&s), idx).unwrap();
        let d = principal_minor(&m, &[0, 1]).unwrap().determinant;
        assert!((d - report.minor_d).abs() < 1e-9);
    }
}
