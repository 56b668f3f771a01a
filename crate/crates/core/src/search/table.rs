//! Cached normally ordered moments for fast repeated CFRD evaluation.
//!
//! Every operator in the CFRD functional has per-mode degree at most two in
//! `a, a†`, so the table of `⟨∏_k a_k†^{q_k} a_k^{p_k}⟩` with `q_k, p_k ≤ 2`
//! determines it for every setting. The optimizer builds the table once per
//! state and evaluates `beta` from it with a few dozen multiply-adds.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::operator::{Ladder, ModeOperator, MomentSource};
use crate::structured::NormalOrderedPoly;

/// Per-mode exponent bound.
pub const TABLE_DEGREE: usize = 2;
const SIDE: usize = TABLE_DEGREE + 1;
const SLOTS: usize = SIDE * SIDE;
/// Largest table the optimizer will build.
pub const MAX_TABLE_ENTRIES: usize = 100_000;

type ModePoly = [C64; SLOTS];

fn slot(q: usize, p: usize) -> usize {
    q * SIDE + p
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    n_modes: usize,
    entries: Vec<C64>,
}

impl MomentTable {
    pub fn table_len(n_modes: usize) -> Option<usize> {
        SLOTS.checked_pow(n_modes as u32)
    }

    pub fn from_source<S: MomentSource + ?Sized>(state: &S) -> Result<Self> {
        let n = state.n_modes();
        let len = Self::table_len(n)
            .filter(|&l| l <= MAX_TABLE_ENTRIES)
            .ok_or_else(|| Error::InvalidArgument(format!("a moment table for {n} modes is too large")))?;
        let mut entries = Vec::with_capacity(len);
        for idx in 0..len {
            let mut rest = idx;
            let mut factors = vec![ModeOperator::identity(); n];
            for k in (0..n).rev() {
                let s = rest % SLOTS;
                rest /= SLOTS;
                let (q, p) = (s / SIDE, s % SIDE);
                let mut word = vec![Ladder::Create; q];
                word.extend(std::iter::repeat_n(Ladder::Annihilate, p));
                factors[k] = ModeOperator::word(word);
            }
            entries.push(state.product_expectation(&factors)?);
        }
        Ok(Self { n_modes: n, entries })
    }

    fn expect(&self, polys: &[ModePoly]) -> C64 {
        self.expect_from(polys, 0, C64::new(1.0, 0.0))
    }

    fn expect_from(&self, polys: &[ModePoly], idx: usize, c: C64) -> C64 {
        let Some((poly, rest)) = polys.split_first() else {
            return c * self.entries[idx];
        };
        let mut acc = C64::new(0.0, 0.0);
        for (s, &w) in poly.iter().enumerate() {
            if w != C64::new(0.0, 0.0) {
                acc += self.expect_from(rest, idx * SLOTS + s, c * w);
            }
        }
        acc
    }

    /// `beta = |⟨∏B(s)⟩|² − ⟨∏(N + 1/(2cos δ))⟩` for raw setting arrays.
    pub fn beta(&self, theta: &[f64], delta: &[f64], s: &[i8]) -> f64 {
        let n = self.n_modes;
        let mut b_polys = Vec::with_capacity(n);
        let mut rhs_polys = Vec::with_capacity(n);
        for k in 0..n {
            let (u, v) = if delta[k] == 0.0 {
                (C64::new(1.0, 0.0), C64::new(0.0, 0.0))
            } else {
                let norm = 2.0 * delta[k].cos().sqrt();
                (
                    (C64::new(1.0, 0.0) + C64::from_polar(1.0, -delta[k])) / norm,
                    C64::from_polar(1.0, 2.0 * theta[k]) * (C64::new(1.0, 0.0) - C64::from_polar(1.0, delta[k])) / norm,
                )
            };
            let mut b = [C64::new(0.0, 0.0); SLOTS];
            if s[k] > 0 {
                b[slot(0, 1)] = u;
                b[slot(1, 0)] = v;
            } else {
                b[slot(1, 0)] = u.conj();
                b[slot(0, 1)] = v.conj();
            }
            b_polys.push(b);
            // b†b = (|u|²+|v|²) a†a + u*v a†² + u v* a² + |v|²
            let mut r = [C64::new(0.0, 0.0); SLOTS];
            r[slot(1, 1)] = C64::new(u.norm_sqr() + v.norm_sqr(), 0.0);
            r[slot(2, 0)] = u.conj() * v;
            r[slot(0, 2)] = u * v.conj();
            r[slot(0, 0)] = C64::new(v.norm_sqr() + 0.5 / delta[k].cos(), 0.0);
            rhs_polys.push(r);
        }
        self.expect(&b_polys).norm_sqr() - self.expect(&rhs_polys).re
    }
}

impl MomentSource for MomentTable {
    fn n_modes(&self) -> usize {
        self.n_modes
    }

    fn product_expectation(&self, factors: &[ModeOperator]) -> Result<C64> {
        crate::operator::check_factor_count(self.n_modes, factors)?;
        let mut polys = Vec::with_capacity(factors.len());
        for (mode, f) in factors.iter().enumerate() {
            let normal = NormalOrderedPoly::from_operator(f);
            let mut poly = [C64::new(0.0, 0.0); SLOTS];
            for (&(q, p), &c) in normal.terms() {
                if q > TABLE_DEGREE || p > TABLE_DEGREE {
                    return Err(Error::InvalidArgument(format!(
                        "mode {mode}: moment a†^{q} a^{p} is not tabulated"
                    )));
                }
                poly[slot(q, p)] += c;
            }
            polys.push(poly);
        }
        Ok(self.expect(&polys))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfrd::{cfrd_evaluate, QuadratureSettings};
    use crate::fock::{random_state, ModeSpec, StateKind};

    #[test]
    fn table_beta_matches_direct_evaluation() {
        let st = random_state(ModeSpec::new(3, 5).unwrap(), StateKind::Mixed, 2, 9).unwrap();
        let table = MomentTable::from_source(&st).unwrap();
        let s = QuadratureSettings::new(vec![0.2, 1.4, -0.6], vec![0.9, -0.3, 0.0], vec![1, -1, -1]).unwrap();
        let direct = cfrd_evaluate(&st, &s).unwrap();
        let fast = table.beta(s.theta(), s.delta(), s.s());
        assert!((direct.beta - fast).abs() < 1e-12);
        let via_trait = cfrd_evaluate(&table, &s).unwrap();
        assert!((via_trait.minor_d - direct.minor_d).abs() < 1e-12);
    }
}
