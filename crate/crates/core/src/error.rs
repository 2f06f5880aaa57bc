use thiserror::Error;

/// Errors raised by constructions, checks and simulations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NaimarkError {
    #[error("invalid dimension {dim}: {reason}")]
    InvalidDimension { dim: usize, reason: &'static str },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown catalog entry '{label}' for d = {dim}")]
    CatalogMiss { dim: usize, label: String },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("frame is rank deficient: Gram rank {rank} < {required}")]
    RankDeficientFrame { rank: usize, required: usize },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported dimension {dim}: qubit circuits need d = 2^n")]
    UnsupportedDimension { dim: usize },
}

pub type Result<T> = std::result::Result<T, NaimarkError>;
