use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("weight {weight} is not dominant for SO({n})")]
    NotDominant { weight: String, n: usize },

    #[error("matrix is not skew-symmetric (max |S + S^t| = {0:e})")]
    NotSkew(f64),

    #[error("pfaffian is only defined for even dimension, got {0}")]
    OddDimension(usize),

    #[error("sweep range too large: {0}")]
    RangeTooLarge(String),

    #[error("empty input: {0}")]
    Empty(String),
}

pub type Result<T> = std::result::Result<T, Error>;
