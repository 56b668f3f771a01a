//! Single-mode ladder-operator algebra shared by every state representation.
//!
//! A [`ModeOperator`] is a finite linear combination of ladder words acting on
//! one bosonic mode. Words are written left to right as operator products, so
//! `[Create, Annihilate]` is `a†a` and the rightmost letter acts first on a ket.
//! Multi-mode observables used throughout the crate are tensor products of one
//! `ModeOperator` per mode, evaluated through [`MomentSource`].

use std::ops::{Add, Mul};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::DenseState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ladder {
    Annihilate,
    Create,
}

impl Ladder {
    pub fn dagger(self) -> Self {
        match self {
            Ladder::Annihilate => Ladder::Create,
            Ladder::Create => Ladder::Annihilate,
        }
    }
}

/// Largest net number of creations reached while applying `word` right to left.
///
/// A truncated Fock matrix reproduces the word exactly on every state whose
/// headroom is at least this value.
pub fn word_peak(word: &[Ladder]) -> usize {
    let mut level: i64 = 0;
    let mut peak: i64 = 0;
    for op in word.iter().rev() {
        level += match op {
            Ladder::Create => 1,
            Ladder::Annihilate => -1,
        };
        peak = peak.max(level);
    }
    peak as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeOperator {
    terms: Vec<(C64, Vec<Ladder>)>,
}

impl ModeOperator {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn identity() -> Self {
        Self::word(Vec::new())
    }

    pub fn annihilate() -> Self {
        Self::word(vec![Ladder::Annihilate])
    }

    pub fn create() -> Self {
        Self::word(vec![Ladder::Create])
    }

    pub fn word(word: Vec<Ladder>) -> Self {
        Self {
            terms: vec![(C64::new(1.0, 0.0), word)],
        }
    }

    /// `u·a + v·a†`; zero coefficients are dropped so that `linear(1, 0)` is exactly `a`.
    pub fn linear(u: C64, v: C64) -> Self {
        let mut terms = Vec::with_capacity(2);
        if u != C64::new(0.0, 0.0) {
            terms.push((u, vec![Ladder::Annihilate]));
        }
        if v != C64::new(0.0, 0.0) {
            terms.push((v, vec![Ladder::Create]));
        }
        Self { terms }
    }

    pub fn from_terms(terms: Vec<(C64, Vec<Ladder>)>) -> Self {
        Self { terms }.pruned()
    }

    pub fn terms(&self) -> &[(C64, Vec<Ladder>)] {
        &self.terms
    }

    pub fn is_identity(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].1.is_empty() && self.terms[0].0 == C64::new(1.0, 0.0)
    }

    pub fn scale(mut self, c: C64) -> Self {
        for (coef, _) in &mut self.terms {
            *coef *= c;
        }
        self.pruned()
    }

    pub fn adjoint(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(c, w)| (c.conj(), w.iter().rev().map(|op| op.dagger()).collect()))
            .collect();
        Self { terms }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::identity();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Headroom a dense state needs for every word of this operator to be exact.
    pub fn headroom_needed(&self) -> usize {
        self.terms.iter().map(|(_, w)| word_peak(w)).max().unwrap_or(0)
    }

    fn pruned(mut self) -> Self {
        self.terms.retain(|(c, _)| *c != C64::new(0.0, 0.0));
        // merge identical words, keeping first-occurrence order
        let mut merged: Vec<(C64, Vec<Ladder>)> = Vec::with_capacity(self.terms.len());
        for (c, w) in self.terms {
            match merged.iter_mut().find(|(_, mw)| *mw == w) {
                Some(entry) => entry.0 += c,
                None => merged.push((c, w)),
            }
        }
        merged.retain(|(c, _)| *c != C64::new(0.0, 0.0));
        Self { terms: merged }
    }
}

impl Mul for &ModeOperator {
    type Output = ModeOperator;

    fn mul(self, rhs: &ModeOperator) -> ModeOperator {
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (cl, wl) in &self.terms {
            for (cr, wr) in &rhs.terms {
                let mut w = Vec::with_capacity(wl.len() + wr.len());
                w.extend_from_slice(wl);
                w.extend_from_slice(wr);
                terms.push((cl * cr, w));
            }
        }
        ModeOperator { terms }.pruned()
    }
}

impl Add for &ModeOperator {
    type Output = ModeOperator;

    fn add(self, rhs: &ModeOperator) -> ModeOperator {
        let mut terms = self.terms.clone();
        terms.extend(rhs.terms.iter().cloned());
        ModeOperator { terms }.pruned()
    }
}

/// Anything that can produce exact expectation values of product operators.
pub trait MomentSource: Sync {
    fn n_modes(&self) -> usize;

    /// `⟨⊗_k factors[k]⟩`; `factors.len()` must equal `n_modes()`.
    fn product_expectation(&self, factors: &[ModeOperator]) -> Result<C64>;

    /// Dense representation, when one exists (required by the partial-transpose oracle).
    fn as_dense(&self) -> Option<&DenseState> {
        None
    }

    /// Expectation of an operator word over modes, written left to right.
    ///
    /// Letters on different modes commute, so the word is regrouped per mode
    /// with the relative order inside each mode preserved.
    fn expectation(&self, word: &[(usize, Ladder)]) -> Result<C64> {
        let factors = group_word(self.n_modes(), word)?;
        self.product_expectation(&factors)
    }
}

pub(crate) fn group_word(n_modes: usize, word: &[(usize, Ladder)]) -> Result<Vec<ModeOperator>> {
    let mut per_mode: Vec<Vec<Ladder>> = vec![Vec::new(); n_modes];
    for &(mode, op) in word {
        if mode >= n_modes {
            return Err(Error::InvalidArgument(format!(
                "word references mode {mode} but the state has {n_modes} modes"
            )));
        }
        per_mode[mode].push(op);
    }
    Ok(per_mode.into_iter().map(ModeOperator::word).collect())
}

pub(crate) fn check_factor_count(n_modes: usize, factors: &[ModeOperator]) -> Result<()> {
    if factors.len() != n_modes {
        return Err(Error::InvalidArgument(format!(
            "{} operator factors supplied for {n_modes} modes",
            factors.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use Ladder::*;

    #[test]
    fn peak_of_common_words() {
        assert_eq!(word_peak(&[Create, Annihilate]), 0);
        assert_eq!(word_peak(&[Annihilate, Create]), 1);
        assert_eq!(word_peak(&[Create, Create]), 2);
        assert_eq!(word_peak(&[Create, Annihilate, Annihilate, Create]), 1);
        assert_eq!(word_peak(&[]), 0);
    }

    #[test]
    fn number_operator_from_linear_parts() {
        let b = ModeOperator::linear(C64::new(2.0, 0.0), C64::new(0.0, 1.0));
        let n = &b.adjoint() * &b;
        // (2a† - i a)(2a + i a†) = 4a†a + 2i a†a† - 2i a a + a a†
        assert_eq!(n.terms().len(), 4);
        assert_eq!(n.headroom_needed(), 2);
        let coef = |w: &[Ladder]| n.terms().iter().find(|(_, x)| x == w).map(|(c, _)| *c);
        assert_eq!(coef(&[Create, Annihilate]), Some(C64::new(4.0, 0.0)));
        assert_eq!(coef(&[Create, Create]), Some(C64::new(0.0, 2.0)));
        assert_eq!(coef(&[Annihilate, Annihilate]), Some(C64::new(0.0, -2.0)));
        assert_eq!(coef(&[Annihilate, Create]), Some(C64::new(1.0, 0.0)));
    }

    #[test]
    fn linear_with_zero_part_is_a_single_word() {
        let b = ModeOperator::linear(C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        assert_eq!(b, ModeOperator::annihilate());
        assert!(ModeOperator::identity().is_identity());
        assert_eq!(ModeOperator::create().pow(3).headroom_needed(), 3);
    }
}
