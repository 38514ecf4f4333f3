use thiserror::Error;

/// Errors produced by polynomial construction, embedding validation and the
/// pointwise verifiers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CrError {
    #[error("dimension mismatch: expected {expected} variables, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("variable index {index} out of range for {m} variables")]
    IndexOutOfRange { index: usize, m: usize },

    #[error("point is off the unit sphere: | |z| - 1 | = {distance:e} exceeds {tolerance:e}")]
    OffSphere { distance: f64, tolerance: f64 },

    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("polynomial is not real-valued")]
    NotReal,

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("rank decision is ambiguous: {0}")]
    RankTolerance(String),
}

pub type Result<T> = std::result::Result<T, CrError>;
