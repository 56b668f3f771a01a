//! Dense truncated Fock-space states.
//!
//! Every mode shares the cutoff `d`, so the single-mode basis is `|0⟩ … |d−1⟩`.
//! Multi-indices are linearized row-major with mode 0 slowest; this is the
//! layout of [`DenseState::amplitudes`] and [`DenseState::density_matrix`].
//!
//! A state carries a headroom `h`: no basis state with any occupation above
//! `d−1−h` has weight. Internally only that support sub-lattice (side `d−h`)
//! is stored. Operator words whose net creation peak is at most `h` are then
//! evaluated exactly, which is what makes every moment in this crate exact
//! rather than an approximation polluted by the cutoff.

pub mod eigen;
mod partial_transpose;

use faer::Mat;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modeset::MAX_MODES;
use crate::operator::{check_factor_count, Ladder, ModeOperator, MomentSource};

pub use partial_transpose::{partial_transpose_min_eig, transpose_modes, PartialTransposeResult};

/// Truncation error tolerated when a state is cut at the support edge.
pub const TRUNCATION_BUDGET: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeSpec {
    n_modes: usize,
    cutoff: usize,
}

impl ModeSpec {
    pub fn new(n_modes: usize, cutoff: usize) -> Result<Self> {
        if n_modes == 0 || n_modes > MAX_MODES {
            return Err(Error::InvalidModeSpec(format!(
                "number of modes must be in 1..={MAX_MODES}, got {n_modes}"
            )));
        }
        if cutoff < 2 {
            return Err(Error::InvalidModeSpec(format!("cutoff must be at least 2, got {cutoff}")));
        }
        let exp = u32::try_from(n_modes).expect("n_modes bounded above");
        if cutoff.checked_pow(exp).is_none() {
            return Err(Error::InvalidModeSpec(format!(
                "dimension {cutoff}^{n_modes} overflows the index range"
            )));
        }
        Ok(Self { n_modes, cutoff })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dimension(&self) -> usize {
        self.cutoff.pow(self.n_modes as u32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Mixed,
}

/// Row-major hypercubic lattice of `n` digits in `0..side`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Lattice {
    pub side: usize,
    pub n: usize,
}

impl Lattice {
    pub fn len(&self) -> usize {
        self.side.pow(self.n as u32)
    }

    pub fn stride(&self, mode: usize) -> usize {
        self.side.pow((self.n - 1 - mode) as u32)
    }

    pub fn digits(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for k in (0..self.n).rev() {
            out[k] = idx % self.side;
            idx /= self.side;
        }
        out
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, &x| acc * self.side + x)
    }

    /// Digits of every index, flattened row by row.
    pub fn digit_table(&self) -> Vec<usize> {
        let mut table = Vec::with_capacity(self.len() * self.n);
        for idx in 0..self.len() {
            table.extend(self.digits(idx));
        }
        table
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Pure(Vec<C64>),
    Mixed(Mat<C64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    spec: ModeSpec,
    headroom: usize,
    repr: Repr,
}

impl DenseState {
    /// Pure state from amplitudes on the support sub-lattice (side `d − headroom`).
    /// The amplitudes are normalized.
    pub fn pure_on_support(spec: ModeSpec, headroom: usize, mut amps: Vec<C64>) -> Result<Self> {
        let lattice = support_lattice(spec, headroom)?;
        if amps.len() != lattice.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} support amplitudes, got {}",
                lattice.len(),
                amps.len()
            )));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::DegenerateNormalization(norm));
        }
        for a in &mut amps {
            *a /= norm;
        }
        Ok(Self {
            spec,
            headroom,
            repr: Repr::Pure(amps),
        })
    }

    /// Mixed state from a density matrix on the support sub-lattice. The matrix
    /// is trace-normalized and must be Hermitian and positive semidefinite.
    pub fn mixed_on_support(spec: ModeSpec, headroom: usize, rho: Mat<C64>) -> Result<Self> {
        let lattice = support_lattice(spec, headroom)?;
        let m = lattice.len();
        if rho.nrows() != m || rho.ncols() != m {
            return Err(Error::InvalidArgument(format!(
                "expected a {m}x{m} support density matrix, got {}x{}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let trace: f64 = (0..m).map(|i| rho[(i, i)].re).sum();
        if !(trace > 0.0 && trace.is_finite()) {
            return Err(Error::DegenerateNormalization(trace));
        }
        let defect = eigen::hermitian_defect(rho.as_ref()) / trace;
        if defect > 1e-10 {
            return Err(Error::Numerical(format!("density matrix is not Hermitian (defect {defect:e})")));
        }
        let rho = Mat::from_fn(m, m, |i, j| (rho[(i, j)] + rho[(j, i)].conj()) * (0.5 / trace));
        let (min_eig, _) = eigen::min_eigenpair(rho.as_ref())?;
        if min_eig < -eigen::EIGEN_TOLERANCE {
            return Err(Error::Numerical(format!(
                "density matrix is not positive semidefinite (min eigenvalue {min_eig:e})"
            )));
        }
        Ok(Self {
            spec,
            headroom,
            repr: Repr::Mixed(rho),
        })
    }

    /// Pure state from a full-lattice amplitude vector; the headroom is read off the support.
    pub fn from_amplitudes(spec: ModeSpec, amps: &[C64]) -> Result<Self> {
        let full = Lattice {
            side: spec.cutoff,
            n: spec.n_modes,
        };
        if amps.len() != full.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} amplitudes, got {}",
                full.len(),
                amps.len()
            )));
        }
        let max_occ = amps
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != ZERO)
            .flat_map(|(i, _)| full.digits(i))
            .max()
            .ok_or(Error::DegenerateNormalization(0.0))?;
        let headroom = spec.cutoff - 1 - max_occ;
        let support = support_lattice(spec, headroom)?;
        let mut out = vec![ZERO; support.len()];
        for (idx, slot) in out.iter_mut().enumerate() {
            *slot = amps[full.index(&support.digits(idx))];
        }
        Self::pure_on_support(spec, headroom, out)
    }

    pub fn spec(&self) -> ModeSpec {
        self.spec
    }

    pub fn n_modes(&self) -> usize {
        self.spec.n_modes
    }

    pub fn headroom(&self) -> usize {
        self.headroom
    }

    pub fn kind(&self) -> StateKind {
        match self.repr {
            Repr::Pure(_) => StateKind::Pure,
            Repr::Mixed(_) => StateKind::Mixed,
        }
    }

    /// Side of the support sub-lattice, `d − headroom`.
    pub fn support_side(&self) -> usize {
        self.spec.cutoff - self.headroom
    }

    pub(crate) fn support(&self) -> Lattice {
        Lattice {
            side: self.support_side(),
            n: self.spec.n_modes,
        }
    }

    fn full(&self) -> Lattice {
        Lattice {
            side: self.spec.cutoff,
            n: self.spec.n_modes,
        }
    }

    pub fn support_amplitudes(&self) -> Option<&[C64]> {
        match &self.repr {
            Repr::Pure(v) => Some(v),
            Repr::Mixed(_) => None,
        }
    }

    /// Density matrix restricted to the support sub-lattice.
    pub fn support_density(&self) -> Mat<C64> {
        match &self.repr {
            Repr::Pure(v) => Mat::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj()),
            Repr::Mixed(rho) => rho.clone(),
        }
    }

    /// Full-lattice amplitudes (`d^n` entries) of a pure state.
    pub fn amplitudes(&self) -> Option<Vec<C64>> {
        let v = self.support_amplitudes()?;
        let (support, full) = (self.support(), self.full());
        let mut out = vec![ZERO; full.len()];
        for (idx, a) in v.iter().enumerate() {
            out[full.index(&support.digits(idx))] = *a;
        }
        Some(out)
    }

    /// Full-lattice density matrix (`d^n × d^n`).
    pub fn density_matrix(&self) -> Mat<C64> {
        let (support, full) = (self.support(), self.full());
        let small = self.support_density();
        let map: Vec<usize> = (0..support.len()).map(|i| full.index(&support.digits(i))).collect();
        let mut out = Mat::<C64>::zeros(full.len(), full.len());
        for j in 0..support.len() {
            for i in 0..support.len() {
                out[(map[i], map[j])] = small[(i, j)];
            }
        }
        out
    }

    /// `⟨ψ|ψ⟩` or `tr ρ`.
    pub fn trace(&self) -> f64 {
        match &self.repr {
            Repr::Pure(v) => v.iter().map(|a| a.norm_sqr()).sum(),
            Repr::Mixed(rho) => (0..rho.nrows()).map(|i| rho[(i, i)].re).sum(),
        }
    }

    /// Checks normalization, Hermiticity and positivity.
    pub fn validate(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - 1.0).abs() > 1e-12 {
            return Err(Error::Numerical(format!("state is not normalized (trace {tr})")));
        }
        if let Repr::Mixed(rho) = &self.repr {
            let defect = eigen::hermitian_defect(rho.as_ref());
            if defect > 1e-12 {
                return Err(Error::Numerical(format!("density matrix not Hermitian ({defect:e})")));
            }
            let (min_eig, _) = eigen::min_eigenpair(rho.as_ref())?;
            if min_eig < -eigen::EIGEN_TOLERANCE {
                return Err(Error::Numerical(format!("density matrix has eigenvalue {min_eig:e}")));
            }
        }
        Ok(())
    }

    /// Matrix of `op` restricted to the support, row-major `side × side`.
    ///
    /// Each word maps a number state to a single number state, so the block is
    /// filled by walking the ladder action column by column.
    fn support_block(&self, mode: usize, op: &ModeOperator) -> Result<Vec<C64>> {
        let needed = op.headroom_needed();
        if needed > self.headroom {
            return Err(Error::Headroom {
                mode,
                needed,
                available: self.headroom,
            });
        }
        let side = self.support_side();
        let mut block = vec![ZERO; side * side];
        for (coef, word) in op.terms() {
            for col in 0..side {
                if let Some((row, amp)) = walk(word, col) {
                    if row < side {
                        block[row * side + col] += coef * amp;
                    }
                }
            }
        }
        Ok(block)
    }
}

/// Applies `word` (rightmost letter first) to `|m⟩`; `None` when it annihilates the vacuum.
fn walk(word: &[Ladder], m: usize) -> Option<(usize, f64)> {
    let mut occ = m;
    let mut amp = 1.0;
    for op in word.iter().rev() {
        match op {
            Ladder::Annihilate => {
                if occ == 0 {
                    return None;
                }
                amp *= (occ as f64).sqrt();
                occ -= 1;
            }
            Ladder::Create => {
                occ += 1;
                amp *= (occ as f64).sqrt();
            }
        }
    }
    Some((occ, amp))
}

fn support_lattice(spec: ModeSpec, headroom: usize) -> Result<Lattice> {
    if headroom >= spec.cutoff {
        return Err(Error::InvalidArgument(format!(
            "headroom {headroom} leaves no support below cutoff {}",
            spec.cutoff
        )));
    }
    Ok(Lattice {
        side: spec.cutoff - headroom,
        n: spec.n_modes,
    })
}

/// Applies a `side × side` block along `mode` of a row-major tensor.
fn apply_along(v: &[C64], lattice: Lattice, mode: usize, block: &[C64]) -> Vec<C64> {
    let side = lattice.side;
    let stride = lattice.stride(mode);
    let outer = lattice.len() / (side * stride);
    let mut out = vec![ZERO; v.len()];
    let mut column = vec![ZERO; side];
    for o in 0..outer {
        for inner in 0..stride {
            let base = o * side * stride + inner;
            for (c, slot) in column.iter_mut().enumerate() {
                *slot = v[base + c * stride];
            }
            for r in 0..side {
                let row = &block[r * side..(r + 1) * side];
                let mut acc = ZERO;
                for (x, y) in row.iter().zip(&column) {
                    acc += x * y;
                }
                out[base + r * stride] = acc;
            }
        }
    }
    out
}

impl MomentSource for DenseState {
    fn n_modes(&self) -> usize {
        self.spec.n_modes
    }

    fn product_expectation(&self, factors: &[ModeOperator]) -> Result<C64> {
        check_factor_count(self.spec.n_modes, factors)?;
        let mut blocks: Vec<Option<Vec<C64>>> = Vec::with_capacity(factors.len());
        for (mode, op) in factors.iter().enumerate() {
            if op.terms().is_empty() {
                return Ok(ZERO);
            }
            blocks.push(if op.is_identity() {
                None
            } else {
                Some(self.support_block(mode, op)?)
            });
        }
        let lattice = self.support();
        match &self.repr {
            Repr::Pure(psi) => {
                let mut phi = psi.clone();
                for (mode, block) in blocks.iter().enumerate() {
                    if let Some(block) = block {
                        phi = apply_along(&phi, lattice, mode, block);
                    }
                }
                Ok(psi.iter().zip(&phi).map(|(a, b)| a.conj() * b).sum())
            }
            Repr::Mixed(rho) => {
                let n = lattice.n;
                let side = lattice.side;
                let digits = lattice.digit_table();
                let m = lattice.len();
                let mut total = ZERO;
                // tr(ρ W) = Σ_ij ρ_ij W_ji
                for j in 0..m {
                    let dj = &digits[j * n..(j + 1) * n];
                    'rows: for i in 0..m {
                        let r = rho[(i, j)];
                        if r == ZERO {
                            continue;
                        }
                        let di = &digits[i * n..(i + 1) * n];
                        let mut w = C64::new(1.0, 0.0);
                        for k in 0..n {
                            match &blocks[k] {
                                None => {
                                    if di[k] != dj[k] {
                                        continue 'rows;
                                    }
                                }
                                Some(b) => w *= b[di[k] * side + dj[k]],
                            }
                        }
                        total += r * w;
                    }
                }
                Ok(total)
            }
        }
    }

    fn as_dense(&self) -> Option<&DenseState> {
        Some(self)
    }
}

pub fn make_basis_state(spec: ModeSpec, occupations: &[usize]) -> Result<DenseState> {
    if occupations.len() != spec.n_modes {
        return Err(Error::InvalidArgument(format!(
            "{} occupations for {} modes",
            occupations.len(),
            spec.n_modes
        )));
    }
    for (mode, &occupation) in occupations.iter().enumerate() {
        if occupation >= spec.cutoff {
            return Err(Error::CutoffViolation {
                mode,
                occupation,
                cutoff: spec.cutoff,
            });
        }
    }
    let max = *occupations.iter().max().expect("at least one mode");
    let headroom = spec.cutoff - 1 - max;
    let lattice = support_lattice(spec, headroom)?;
    let mut amps = vec![ZERO; lattice.len()];
    amps[lattice.index(occupations)] = C64::new(1.0, 0.0);
    DenseState::pure_on_support(spec, headroom, amps)
}

/// `(|0…0⟩ + phase·|1…1⟩)/√2`.
pub fn make_ghz_like(spec: ModeSpec, phase: C64) -> Result<DenseState> {
    if (phase.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("phase {phase} is not a unit complex number")));
    }
    let headroom = spec.cutoff - 2;
    let lattice = support_lattice(spec, headroom)?;
    let mut amps = vec![ZERO; lattice.len()];
    amps[0] = C64::new(1.0, 0.0);
    amps[lattice.len() - 1] = phase;
    DenseState::pure_on_support(spec, headroom, amps)
}

/// `Σ_{m≥side} |α|^{2m}/m!`, the weight a coherent amplitude loses when cut at `side`.
pub fn coherent_tail(alpha: C64, side: usize) -> f64 {
    let x = alpha.norm_sqr();
    if x == 0.0 {
        return 0.0;
    }
    let mut log_term = side as f64 * x.ln() - ln_factorial(side);
    let mut m = side;
    let mut sum = 0.0;
    loop {
        let term = log_term.exp();
        sum += term;
        m += 1;
        log_term += x.ln() - (m as f64).ln();
        if (m as f64) > x && log_term.exp() < 1e-18 * sum.max(1e-300) {
            break;
        }
        if m > side + 100_000 {
            break;
        }
    }
    sum
}

fn ln_factorial(m: usize) -> f64 {
    (2..=m).map(|k| (k as f64).ln()).sum()
}

/// Single-mode coherent amplitudes `e^{−|α|²/2} α^m/√m!` for `m < side`.
pub(crate) fn coherent_amplitudes(alpha: C64, side: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(side);
    let mut a = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for m in 0..side {
        out.push(a);
        a = a * alpha / ((m + 1) as f64).sqrt();
    }
    out
}

/// Normalized truncated product of coherent states, cut at `d − headroom`.
pub fn make_coherent_product(spec: ModeSpec, alphas: &[C64], headroom: usize) -> Result<DenseState> {
    if alphas.len() != spec.n_modes {
        return Err(Error::InvalidArgument(format!(
            "{} amplitudes for {} modes",
            alphas.len(),
            spec.n_modes
        )));
    }
    let lattice = support_lattice(spec, headroom)?;
    let mut factors = Vec::with_capacity(alphas.len());
    for (mode, &alpha) in alphas.iter().enumerate() {
        let error = coherent_tail(alpha, lattice.side);
        if error > TRUNCATION_BUDGET {
            return Err(Error::TruncationBudget {
                mode,
                error,
                budget: TRUNCATION_BUDGET,
            });
        }
        factors.push(coherent_amplitudes(alpha, lattice.side));
    }
    DenseState::pure_on_support(spec, headroom, product_amplitudes(lattice, &factors))
}

pub(crate) fn product_amplitudes(lattice: Lattice, factors: &[Vec<C64>]) -> Vec<C64> {
    (0..lattice.len())
        .map(|idx| {
            lattice
                .digits(idx)
                .iter()
                .zip(factors)
                .map(|(&m, f)| f[m])
                .product()
        })
        .collect()
}

/// Normalized truncation of `√(1−λ²) Σ λ^m |m,m⟩`, `λ = tanh r`, cut at `d − headroom`.
pub fn make_two_mode_squeezed(spec: ModeSpec, r: f64, headroom: usize) -> Result<DenseState> {
    if spec.n_modes != 2 {
        return Err(Error::InvalidArgument(format!(
            "two-mode squeezed vacuum needs 2 modes, got {}",
            spec.n_modes
        )));
    }
    let lattice = support_lattice(spec, headroom)?;
    let lambda = r.tanh();
    let error = lambda.abs().powi(2 * lattice.side as i32);
    if error > TRUNCATION_BUDGET {
        return Err(Error::TruncationBudget {
            mode: 0,
            error,
            budget: TRUNCATION_BUDGET,
        });
    }
    let mut amps = vec![ZERO; lattice.len()];
    let c = (1.0 - lambda * lambda).sqrt();
    for m in 0..lattice.side {
        amps[lattice.index(&[m, m])] = C64::new(c * lambda.powi(m as i32), 0.0);
    }
    DenseState::pure_on_support(spec, headroom, amps)
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Random state on the support sub-lattice, deterministic in `seed`.
///
/// Pure states have complex-Gaussian amplitudes; mixed states are `GG†/tr(GG†)`
/// with a square complex-Gaussian `G`.
pub fn random_state(spec: ModeSpec, kind: StateKind, headroom: usize, seed: u64) -> Result<DenseState> {
    let lattice = support_lattice(spec, headroom)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = lattice.len();
    match kind {
        StateKind::Pure => {
            let amps = (0..m).map(|_| complex_gaussian(&mut rng)).collect();
            DenseState::pure_on_support(spec, headroom, amps)
        }
        StateKind::Mixed => {
            let g = Mat::from_fn(m, m, |_, _| complex_gaussian(&mut rng));
            let rho = &g * g.adjoint();
            DenseState::mixed_on_support(spec, headroom, rho)
        }
    }
}

/// Random convex mixture of `n_terms` product states.
pub fn random_separable_state(spec: ModeSpec, headroom: usize, n_terms: usize, seed: u64) -> Result<DenseState> {
    if n_terms == 0 {
        return Err(Error::InvalidArgument("a mixture needs at least one term".into()));
    }
    let lattice = support_lattice(spec, headroom)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weight = Uniform::new(0.05, 1.0).expect("valid range");
    let m = lattice.len();
    let digits = lattice.digit_table();
    let n = lattice.n;
    let mut rho = Mat::<C64>::zeros(m, m);
    for _ in 0..n_terms {
        let p: f64 = weight.sample(&mut rng);
        let locals: Vec<Vec<C64>> = (0..n)
            .map(|_| {
                let v: Vec<C64> = (0..lattice.side).map(|_| complex_gaussian(&mut rng)).collect();
                let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                v.into_iter().map(|x| x / norm).collect()
            })
            .collect();
        let psi: Vec<C64> = (0..m)
            .map(|i| (0..n).map(|k| locals[k][digits[i * n + k]]).product())
            .collect();
        for j in 0..m {
            for i in 0..m {
                rho[(i, j)] += psi[i] * psi[j].conj() * p;
            }
        }
    }
    DenseState::mixed_on_support(spec, headroom, rho)
}

/// Applies a single ladder operator on `mode`. The result is not renormalized.
///
/// Pure states map to `A|ψ⟩`, mixed states to `AρA†`. A creation consumes one
/// unit of headroom.
pub fn apply_mode_op(state: &DenseState, mode: usize, op: Ladder) -> Result<DenseState> {
    if mode >= state.n_modes() {
        return Err(Error::InvalidArgument(format!("mode {mode} out of range")));
    }
    let headroom = match op {
        Ladder::Create => state.headroom.checked_sub(1).ok_or(Error::Headroom {
            mode,
            needed: 1,
            available: 0,
        })?,
        Ladder::Annihilate => state.headroom,
    };
    let old = state.support();
    let new = Lattice {
        side: state.spec.cutoff - headroom,
        n: old.n,
    };
    // image index and amplitude of every old basis index
    let image: Vec<Option<(usize, f64)>> = (0..old.len())
        .map(|idx| {
            let mut digits = old.digits(idx);
            let (occ, amp) = walk(&[op], digits[mode])?;
            digits[mode] = occ;
            Some((new.index(&digits), amp))
        })
        .collect();
    let repr = match &state.repr {
        Repr::Pure(v) => {
            let mut out = vec![ZERO; new.len()];
            for (idx, target) in image.iter().enumerate() {
                if let Some((t, amp)) = target {
                    out[*t] += v[idx] * *amp;
                }
            }
            Repr::Pure(out)
        }
        Repr::Mixed(rho) => {
            let mut out = Mat::<C64>::zeros(new.len(), new.len());
            for (j, tj) in image.iter().enumerate() {
                let Some((tj, aj)) = tj else { continue };
                for (i, ti) in image.iter().enumerate() {
                    if let Some((ti, ai)) = ti {
                        out[(*ti, *tj)] += rho[(i, j)] * (ai * aj);
                    }
                }
            }
            Repr::Mixed(out)
        }
    };
    Ok(DenseState {
        spec: state.spec,
        headroom,
        repr,
    })
}

/// Local phase rotations `⊗_k exp(i φ_k N_k)`.
pub fn apply_local_rotations(state: &DenseState, phases: &[f64]) -> Result<DenseState> {
    if phases.len() != state.n_modes() {
        return Err(Error::InvalidArgument(format!(
            "{} phases for {} modes",
            phases.len(),
            state.n_modes()
        )));
    }
    let lattice = state.support();
    let phase_of = |idx: usize| -> C64 {
        let angle: f64 = lattice
            .digits(idx)
            .iter()
            .zip(phases)
            .map(|(&m, &phi)| m as f64 * phi)
            .sum();
        C64::from_polar(1.0, angle)
    };
    let repr = match &state.repr {
        Repr::Pure(v) => Repr::Pure(v.iter().enumerate().map(|(i, a)| a * phase_of(i)).collect()),
        Repr::Mixed(rho) => {
            let ph: Vec<C64> = (0..lattice.len()).map(phase_of).collect();
            Repr::Mixed(Mat::from_fn(rho.nrows(), rho.ncols(), |i, j| {
                rho[(i, j)] * ph[i] * ph[j].conj()
            }))
        }
    };
    Ok(DenseState {
        spec: state.spec,
        headroom: state.headroom,
        repr,
    })
}

#[cfg(test)]
mod tests;
