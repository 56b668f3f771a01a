//! Exact moments of finite superpositions of product kets.
//!
//! Every single-mode factor is a number state or a coherent state. Operators
//! are normal ordered first, after which all matrix elements reduce to closed
//! forms, so no cutoff is involved and large mode counts stay cheap.

mod normal;

use faer::Mat;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{coherent_amplitudes, coherent_tail, product_amplitudes, DenseState, Lattice, ModeSpec, TRUNCATION_BUDGET};
use crate::modeset::{ModeSet, MAX_MODES};
use crate::operator::{check_factor_count, Ladder, ModeOperator, MomentSource};

pub use normal::{normal_order, NormalOrderedPoly};

/// Coefficients below this magnitude are dropped when a state is built.
pub const COEFFICIENT_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrimitiveKet {
    Number(usize),
    Coherent(C64),
}

impl PrimitiveKet {
    /// `a^p |self⟩ = factor · |ket⟩`, or `None` when it vanishes.
    fn lowered(self, p: usize) -> Option<(C64, PrimitiveKet)> {
        match self {
            PrimitiveKet::Coherent(g) => Some((g.powu(p as u32), self)),
            PrimitiveKet::Number(m) => {
                if p > m {
                    return None;
                }
                let f: f64 = ((m - p + 1)..=m).map(|x| (x as f64).sqrt()).product();
                Some((C64::new(f, 0.0), PrimitiveKet::Number(m - p)))
            }
        }
    }
}

/// `⟨m|γ⟩ = e^{−|γ|²/2} γ^m / √m!`.
fn number_coherent(m: usize, g: C64) -> C64 {
    let mut out = C64::new((-g.norm_sqr() / 2.0).exp(), 0.0);
    for k in 1..=m {
        out *= g / (k as f64).sqrt();
    }
    out
}

pub fn overlap(bra: PrimitiveKet, ket: PrimitiveKet) -> C64 {
    use PrimitiveKet::*;
    match (bra, ket) {
        (Number(m), Number(n)) => C64::new(if m == n { 1.0 } else { 0.0 }, 0.0),
        (Number(m), Coherent(g)) => number_coherent(m, g),
        (Coherent(b), Number(n)) => number_coherent(n, b).conj(),
        (Coherent(b), Coherent(g)) => (-b.norm_sqr() / 2.0 - g.norm_sqr() / 2.0 + b.conj() * g).exp(),
    }
}

/// `⟨bra| Σ c_{qp} a†^q a^p |ket⟩`, using `⟨u|a†^q a^p|v⟩ = ⟨a^q u|a^p v⟩`.
pub fn single_mode_matrix_element(bra: PrimitiveKet, poly: &NormalOrderedPoly, ket: PrimitiveKet) -> C64 {
    let mut total = C64::new(0.0, 0.0);
    for (&(q, p), &c) in poly.terms() {
        let (Some((fb, b)), Some((fk, k))) = (bra.lowered(q), ket.lowered(p)) else {
            continue;
        };
        total += c * fb.conj() * fk * overlap(b, k);
    }
    total
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructuredState {
    n_modes: usize,
    terms: Vec<(C64, Vec<PrimitiveKet>)>,
}

impl StructuredState {
    /// Builds and normalizes `Σ c_i ⊗_k |f_ik⟩`.
    pub fn new(terms: Vec<(C64, Vec<PrimitiveKet>)>) -> Result<Self> {
        let state = Self::unnormalized(terms)?;
        let norm = state.norm_sqr();
        if !(norm > COEFFICIENT_FLOOR && norm.is_finite()) {
            return Err(Error::DegenerateNormalization(norm));
        }
        let scale = 1.0 / norm.sqrt();
        Ok(Self {
            n_modes: state.n_modes,
            terms: state.terms.into_iter().map(|(c, f)| (c * scale, f)).collect(),
        })
    }

    fn unnormalized(terms: Vec<(C64, Vec<PrimitiveKet>)>) -> Result<Self> {
        let n_modes = terms
            .first()
            .map(|(_, f)| f.len())
            .ok_or_else(|| Error::InvalidArgument("a structured state needs at least one term".into()))?;
        if n_modes == 0 || n_modes > MAX_MODES {
            return Err(Error::InvalidModeSpec(format!(
                "number of modes must be in 1..={MAX_MODES}, got {n_modes}"
            )));
        }
        if terms.iter().any(|(_, f)| f.len() != n_modes) {
            return Err(Error::InvalidArgument("terms disagree on the number of modes".into()));
        }
        let before = terms.len();
        let terms: Vec<_> = terms.into_iter().filter(|(c, _)| c.norm() >= COEFFICIENT_FLOOR).collect();
        if terms.len() < before {
            log::warn!("dropped {} term(s) with coefficients below {COEFFICIENT_FLOOR:e}", before - terms.len());
        }
        if terms.is_empty() {
            return Err(Error::DegenerateNormalization(0.0));
        }
        Ok(Self { n_modes, terms })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn terms(&self) -> &[(C64, Vec<PrimitiveKet>)] {
        &self.terms
    }

    /// Overlaps `⟨term_i|term_j⟩` without coefficients.
    pub fn gram_matrix(&self) -> Mat<C64> {
        let m = self.terms.len();
        Mat::from_fn(m, m, |i, j| {
            self.terms[i]
                .1
                .iter()
                .zip(&self.terms[j].1)
                .map(|(&b, &k)| overlap(b, k))
                .product()
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        let g = self.gram_matrix();
        let mut total = C64::new(0.0, 0.0);
        for (i, (ci, _)) in self.terms.iter().enumerate() {
            for (j, (cj, _)) in self.terms.iter().enumerate() {
                total += ci.conj() * cj * g[(i, j)];
            }
        }
        total.re
    }

    /// Dense image on a `d^n` lattice, cut at `d − headroom` and renormalized.
    pub fn to_dense(&self, spec: ModeSpec, headroom: usize) -> Result<DenseState> {
        if spec.n_modes() != self.n_modes {
            return Err(Error::InvalidArgument(format!(
                "mode spec has {} modes, state has {}",
                spec.n_modes(),
                self.n_modes
            )));
        }
        if headroom >= spec.cutoff() {
            return Err(Error::InvalidArgument(format!("headroom {headroom} leaves no support")));
        }
        let lattice = Lattice {
            side: spec.cutoff() - headroom,
            n: self.n_modes,
        };
        let mut amps = vec![C64::new(0.0, 0.0); lattice.len()];
        for (c, factors) in &self.terms {
            let mut locals = Vec::with_capacity(factors.len());
            for (mode, f) in factors.iter().enumerate() {
                locals.push(match *f {
                    PrimitiveKet::Number(m) => {
                        if m >= lattice.side {
                            return Err(Error::CutoffViolation {
                                mode,
                                occupation: m,
                                cutoff: lattice.side,
                            });
                        }
                        let mut v = vec![C64::new(0.0, 0.0); lattice.side];
                        v[m] = C64::new(1.0, 0.0);
                        v
                    }
                    PrimitiveKet::Coherent(g) => {
                        let error = coherent_tail(g, lattice.side);
                        if error > TRUNCATION_BUDGET {
                            return Err(Error::TruncationBudget {
                                mode,
                                error,
                                budget: TRUNCATION_BUDGET,
                            });
                        }
                        coherent_amplitudes(g, lattice.side)
                    }
                });
            }
            for (slot, a) in amps.iter_mut().zip(product_amplitudes(lattice, &locals)) {
                *slot += c * a;
            }
        }
        DenseState::pure_on_support(spec, headroom, amps)
    }
}

impl MomentSource for StructuredState {
    fn n_modes(&self) -> usize {
        self.n_modes
    }

    fn product_expectation(&self, factors: &[ModeOperator]) -> Result<C64> {
        check_factor_count(self.n_modes, factors)?;
        let polys: Vec<Option<NormalOrderedPoly>> = factors
            .iter()
            .map(|f| (!f.is_identity()).then(|| NormalOrderedPoly::from_operator(f)))
            .collect();
        let mut total = C64::new(0.0, 0.0);
        for (ci, fi) in &self.terms {
            for (cj, fj) in &self.terms {
                let mut w = ci.conj() * cj;
                for ((&b, &k), poly) in fi.iter().zip(fj).zip(&polys) {
                    w *= match poly {
                        None => overlap(b, k),
                        Some(p) => single_mode_matrix_element(b, p, k),
                    };
                    if w == C64::new(0.0, 0.0) {
                        break;
                    }
                }
                total += w;
            }
        }
        Ok(total)
    }
}

/// Expectation of an operator word over modes, written left to right.
pub fn structured_moment(state: &StructuredState, word: &[(usize, Ladder)]) -> Result<C64> {
    state.expectation(word)
}

fn check_sign(sign: i8) -> Result<f64> {
    match sign {
        1 => Ok(1.0),
        -1 => Ok(-1.0),
        _ => Err(Error::InvalidArgument(format!("sign must be +1 or -1, got {sign}"))),
    }
}

/// `N(|α⟩^⊗n + sign·|−α⟩^⊗n)`.
pub fn make_cat_family(n: usize, alpha: C64, sign: i8) -> Result<StructuredState> {
    let sgn = check_sign(sign)?;
    if n == 0 || n > MAX_MODES {
        return Err(Error::InvalidModeSpec(format!("number of modes must be in 1..={MAX_MODES}, got {n}")));
    }
    // 2(1 + sign·e^{−2n|α|²}), via expm1 so that small |α| keeps full precision
    let x = -2.0 * n as f64 * alpha.norm_sqr();
    let norm = if sign > 0 { 2.0 * (1.0 + x.exp()) } else { -2.0 * x.exp_m1() };
    if !(norm > COEFFICIENT_FLOOR) {
        return Err(Error::DegenerateNormalization(norm));
    }
    let c = 1.0 / norm.sqrt();
    StructuredState::unnormalized(vec![
        (C64::new(c, 0.0), vec![PrimitiveKet::Coherent(alpha); n]),
        (C64::new(sgn * c, 0.0), vec![PrimitiveKet::Coherent(-alpha); n]),
    ])
}

/// `(|x⟩ + phase·|x̄⟩)/√2` where `x` has occupation 1 on `ones` and 0 elsewhere
/// and `x̄` is its complement. `ones = ∅` gives the GHZ-like state.
pub fn make_number_cat(n: usize, ones: ModeSet, phase: C64) -> Result<StructuredState> {
    if n == 0 || n > MAX_MODES || !ones.fits(n) {
        return Err(Error::InvalidModeSpec(format!("bad mode count {n} or pattern {:?}", ones.modes())));
    }
    if (phase.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("phase {phase} is not a unit complex number")));
    }
    let x: Vec<PrimitiveKet> = (0..n).map(|k| PrimitiveKet::Number(ones.contains(k) as usize)).collect();
    let xbar: Vec<PrimitiveKet> = (0..n).map(|k| PrimitiveKet::Number(!ones.contains(k) as usize)).collect();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    StructuredState::unnormalized(vec![(C64::new(h, 0.0), x), (phase * h, xbar)])
}

#[cfg(test)]
mod tests;
