//! Minimal eigenpair of a Hermitian matrix.
//!
//! The matrix is first split into the connected components of its sparsity
//! graph (a permutation similarity, so the spectrum is unchanged) and each
//! component is handed to faer's self-adjoint eigensolver. Partial transposes
//! of structured states such as the two-mode squeezed vacuum collapse into
//! tiny blocks this way, while generic states keep a single dense block.

use faer::{Mat, MatRef, Side};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Absolute tolerance used when reporting Hermitian eigenvalues as real numbers.
pub const EIGEN_TOLERANCE: f64 = 1e-10;

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn components(mat: MatRef<'_, C64>) -> Vec<Vec<usize>> {
    let n = mat.nrows();
    let mut dsu = DisjointSet::new(n);
    for j in 0..n {
        for i in (j + 1)..n {
            if mat[(i, j)] != C64::new(0.0, 0.0) || mat[(j, i)] != C64::new(0.0, 0.0) {
                dsu.union(i, j);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let root = dsu.find(i);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(i);
    }
    groups
}

/// Largest elementwise deviation from Hermiticity.
pub fn hermitian_defect(mat: MatRef<'_, C64>) -> f64 {
    let n = mat.nrows();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in j..n {
            worst = worst.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Smallest eigenvalue and a normalized eigenvector of a Hermitian matrix.
pub fn min_eigenpair(mat: MatRef<'_, C64>) -> Result<(f64, Vec<C64>)> {
    let n = mat.nrows();
    if n == 0 || mat.ncols() != n {
        return Err(Error::InvalidArgument(format!(
            "eigensolve needs a nonempty square matrix, got {}x{}",
            mat.nrows(),
            mat.ncols()
        )));
    }

    let mut best: Option<(f64, Vec<usize>, Vec<C64>)> = None;
    for group in components(mat) {
        let (value, local) = if group.len() == 1 {
            let i = group[0];
            (mat[(i, i)].re, vec![C64::new(1.0, 0.0)])
        } else {
            let m = group.len();
            let block = Mat::from_fn(m, m, |i, j| mat[(group[i], group[j])]);
            let evd = block
                .as_ref()
                .self_adjoint_eigen(Side::Lower)
                .map_err(|e| Error::Numerical(format!("eigensolver failed: {e:?}")))?;
            let s = evd.S().column_vector();
            let mut arg = 0;
            for k in 1..m {
                if s[k].re < s[arg].re {
                    arg = k;
                }
            }
            let u = evd.U();
            (s[arg].re, (0..m).map(|i| u[(i, arg)]).collect())
        };
        if best.as_ref().is_none_or(|(b, _, _)| value < *b) {
            best = Some((value, group, local));
        }
    }

    let (value, group, local) = best.expect("at least one component");
    let mut vector = vec![C64::new(0.0, 0.0); n];
    for (&i, &x) in group.iter().zip(&local) {
        vector[i] = x;
    }
    let norm = vector.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    for x in &mut vector {
        *x /= norm;
    }

    // Rayleigh quotient doubles as a residue check on the returned pair.
    let mut rq = C64::new(0.0, 0.0);
    for (j, &xj) in vector.iter().enumerate() {
        if xj == C64::new(0.0, 0.0) {
            continue;
        }
        for (i, &xi) in vector.iter().enumerate() {
            rq += xi.conj() * mat[(i, j)] * xj;
        }
    }
    let scale = value.abs().max(1.0);
    if rq.im.abs() > EIGEN_TOLERANCE * scale || (rq.re - value).abs() > 1e-8 * scale {
        return Err(Error::Numerical(format!(
            "eigenpair residue too large: eigenvalue {value}, Rayleigh quotient {rq}"
        )));
    }
    Ok((value, vector))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_diagonal_matrix_is_split() {
        // [[0, 1], [1, 0]] ⊕ [2]
        let mut m = Mat::<C64>::zeros(3, 3);
        m[(0, 1)] = C64::new(1.0, 0.0);
        m[(1, 0)] = C64::new(1.0, 0.0);
        m[(2, 2)] = C64::new(2.0, 0.0);
        assert_eq!(components(m.as_ref()).len(), 2);
        let (value, vec) = min_eigenpair(m.as_ref()).unwrap();
        assert!((value + 1.0).abs() < 1e-14);
        assert!((vec[0] + vec[1]).norm() < 1e-12);
        assert_eq!(vec[2], C64::new(0.0, 0.0));
    }

    #[test]
    fn complex_hermitian_two_by_two() {
        // eigenvalues of [[1, i], [-i, 1]] are 0 and 2
        let mut m = Mat::<C64>::zeros(2, 2);
        m[(0, 0)] = C64::new(1.0, 0.0);
        m[(1, 1)] = C64::new(1.0, 0.0);
        m[(0, 1)] = C64::new(0.0, 1.0);
        m[(1, 0)] = C64::new(0.0, -1.0);
        let (value, _) = min_eigenpair(m.as_ref()).unwrap();
        assert!(value.abs() < 1e-14);
        assert_eq!(hermitian_defect(m.as_ref()), 0.0);
    }
}
