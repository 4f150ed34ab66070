use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual} ({context})")]
    DimensionMismatch {
        expected: usize,
        actual: usize,
        context: &'static str,
    },

    #[error("not a permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("negative weight at index {0}")]
    NegativeWeight(usize),

    #[error("singular normal equations (lambda = 0 and rank-deficient design matrix)")]
    SingularSystem,

    #[error("optimizer diverged: {0}")]
    Divergence(String),

    #[error("line {line}: {message}")]
    DataFormat { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("usage: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
