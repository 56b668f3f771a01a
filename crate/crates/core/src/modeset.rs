use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A set of mode indices (0-based), stored as a bitmask. Bit `k` is mode `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct ModeSet(u64);

pub const MAX_MODES: usize = 64;

impl ModeSet {
    pub fn empty() -> Self {
        Self(0)
    }

    pub fn all(n_modes: usize) -> Self {
        if n_modes >= MAX_MODES {
            Self(u64::MAX)
        } else {
            Self((1u64 << n_modes) - 1)
        }
    }

    pub fn from_mask(mask: u64) -> Self {
        Self(mask)
    }

    pub fn from_modes(modes: &[usize]) -> Result<Self> {
        let mut mask = 0u64;
        for &k in modes {
            if k >= MAX_MODES {
                return Err(Error::InvalidArgument(format!("mode index {k} out of range")));
            }
            mask |= 1 << k;
        }
        Ok(Self(mask))
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn contains(self, k: usize) -> bool {
        k < MAX_MODES && self.0 & (1 << k) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn modes(self) -> Vec<usize> {
        (0..MAX_MODES).filter(|&k| self.contains(k)).collect()
    }

    /// Fits inside `n_modes` modes.
    pub fn fits(self, n_modes: usize) -> bool {
        self.0 & !Self::all(n_modes).0 == 0
    }

    /// `∅` or every mode: no transposition at all.
    pub fn is_trivial(self, n_modes: usize) -> bool {
        self.0 == 0 || self.0 == Self::all(n_modes).0
    }

    pub fn complement(self, n_modes: usize) -> Self {
        Self(!self.0 & Self::all(n_modes).0)
    }
}

impl Serialize for ModeSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.modes().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ModeSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let modes = Vec::<usize>::deserialize(deserializer)?;
        ModeSet::from_modes(&modes).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_and_complement() {
        assert!(ModeSet::empty().is_trivial(3));
        assert!(ModeSet::all(3).is_trivial(3));
        let i = ModeSet::from_modes(&[0, 2]).unwrap();
        assert!(!i.is_trivial(3));
        assert_eq!(i.complement(3).modes(), vec![1]);
        assert!(i.fits(3));
        assert!(!i.fits(2));
        assert_eq!(serde_json::to_string(&i).unwrap(), "[0,2]");
    }
}
