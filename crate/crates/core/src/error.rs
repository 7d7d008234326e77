use thiserror::Error;

/// Errors raised by matrix construction, parameter validation and the
/// numerical backend.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension must be at least 1")]
    EmptyDimension,

    #[error("non-finite entry at {0}")]
    NonFinite(String),

    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,

    #[error("vector is not unit norm (norm = {0})")]
    NotUnit(f64),

    #[error("target isometry spans {available} dimensions, rank {required} required")]
    RankDeficientTarget { required: usize, available: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("input outside the map's domain: {0}")]
    Domain(String),

    #[error("numerical backend failure: {0}")]
    Backend(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
