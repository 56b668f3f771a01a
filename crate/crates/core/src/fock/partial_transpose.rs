use faer::{Mat, MatRef};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{eigen, DenseState, Lattice};
use crate::error::{Error, Result};
use crate::modeset::ModeSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialTransposeResult {
    pub bipartition: ModeSet,
    pub min_eigenvalue: f64,
    /// Normalized eigenvector on the full `d^n` lattice.
    pub witness: Vec<C64>,
}

/// Transposes the indices of `modes` in a density matrix on a `side^n_modes` lattice.
pub fn transpose_modes(rho: MatRef<'_, C64>, side: usize, n_modes: usize, modes: ModeSet) -> Mat<C64> {
    let lattice = Lattice { side, n: n_modes };
    let m = lattice.len();
    assert_eq!(rho.nrows(), m, "matrix does not match the lattice");
    let digits = lattice.digit_table();
    let swapped = modes.modes();
    Mat::from_fn(m, m, |i, j| {
        let mut di = digits[i * n_modes..(i + 1) * n_modes].to_vec();
        let mut dj = digits[j * n_modes..(j + 1) * n_modes].to_vec();
        for &k in &swapped {
            std::mem::swap(&mut di[k], &mut dj[k]);
        }
        rho[(lattice.index(&di), lattice.index(&dj))]
    })
}

/// Minimal eigenvalue of `ρ^{T_I}`; pure states are promoted to `|ψ⟩⟨ψ|`.
///
/// The eigensolve runs on the support sub-lattice. Outside it the transposed
/// matrix vanishes, so with positive headroom the spectrum also contains 0.
pub fn partial_transpose_min_eig(state: &DenseState, bipartition: ModeSet) -> Result<PartialTransposeResult> {
    let n = state.n_modes();
    if !bipartition.fits(n) {
        return Err(Error::InvalidArgument(format!(
            "bipartition {:?} references modes beyond {n}",
            bipartition.modes()
        )));
    }
    if bipartition.is_trivial(n) {
        return Err(Error::TrivialBipartition(bipartition.modes()));
    }
    let support = state.support();
    let rho = state.support_density();
    let pt = transpose_modes(rho.as_ref(), support.side, n, bipartition);
    let (value, vector) = eigen::min_eigenpair(pt.as_ref())?;

    let full = Lattice {
        side: state.spec().cutoff(),
        n,
    };
    let mut witness = vec![C64::new(0.0, 0.0); full.len()];
    if value > 0.0 && state.headroom() > 0 {
        // any basis vector outside the support spans the kernel
        witness[full.len() - 1] = C64::new(1.0, 0.0);
        return Ok(PartialTransposeResult {
            bipartition,
            min_eigenvalue: 0.0,
            witness,
        });
    }
    for (idx, x) in vector.into_iter().enumerate() {
        witness[full.index(&support.digits(idx))] = x;
    }
    Ok(PartialTransposeResult {
        bipartition,
        min_eigenvalue: value,
        witness,
    })
}
