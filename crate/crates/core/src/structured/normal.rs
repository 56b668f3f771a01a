use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::operator::{Ladder, ModeOperator};

/// `Σ c_{qp} a†^q a^p` for a single mode, keyed by `(q, p)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NormalOrderedPoly {
    terms: BTreeMap<(usize, usize), C64>,
}

impl NormalOrderedPoly {
    pub fn identity() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((0, 0), C64::new(1.0, 0.0));
        Self { terms }
    }

    pub fn terms(&self) -> &BTreeMap<(usize, usize), C64> {
        &self.terms
    }

    pub fn coefficient(&self, q: usize, p: usize) -> C64 {
        self.terms.get(&(q, p)).copied().unwrap_or_default()
    }

    fn add(&mut self, key: (usize, usize), c: C64) {
        let slot = self.terms.entry(key).or_default();
        *slot += c;
        if *slot == C64::new(0.0, 0.0) {
            self.terms.remove(&key);
        }
    }

    /// Right multiplication by one ladder letter, keeping normal order.
    fn times(&self, op: Ladder) -> Self {
        let mut out = Self::default();
        for (&(q, p), &c) in &self.terms {
            match op {
                Ladder::Annihilate => out.add((q, p + 1), c),
                Ladder::Create => {
                    // a^p a† = a† a^p + p a^{p-1}
                    out.add((q + 1, p), c);
                    if p > 0 {
                        out.add((q, p - 1), c * p as f64);
                    }
                }
            }
        }
        out
    }

    /// Normal-ordered form of a whole single-mode operator.
    pub fn from_operator(op: &ModeOperator) -> Self {
        let mut out = Self::default();
        for (c, word) in op.terms() {
            for (&key, &v) in normal_order(word).terms() {
                out.add(key, c * v);
            }
        }
        out
    }
}

/// Normal-orders a single-mode word (written left to right).
pub fn normal_order(word: &[Ladder]) -> NormalOrderedPoly {
    word.iter().fold(NormalOrderedPoly::identity(), |acc, &op| acc.times(op))
}
