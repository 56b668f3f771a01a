use thiserror::Error;

/// Errors produced by state construction and moment evaluation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mode {mode}: occupation {occupation} does not fit below cutoff {cutoff}")]
    CutoffViolation {
        mode: usize,
        occupation: usize,
        cutoff: usize,
    },

    #[error("mode {mode}: operator needs headroom {needed}, state only guarantees {available}")]
    Headroom {
        mode: usize,
        needed: usize,
        available: usize,
    },

    #[error("mode {mode}: truncation error {error:e} exceeds budget {budget:e}")]
    TruncationBudget {
        mode: usize,
        error: f64,
        budget: f64,
    },

    #[error("bipartition {0:?} is trivial (no transposition at all)")]
    TrivialBipartition(Vec<usize>),

    #[error("invalid measurement settings: {0}")]
    InvalidSettings(String),

    #[error("invalid mode specification: {0}")]
    InvalidModeSpec(String),

    #[error("degenerate normalization ({0:e})")]
    DegenerateNormalization(f64),

    #[error("numerical consistency failure: {0}")]
    Numerical(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
