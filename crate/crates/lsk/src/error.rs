use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("column {0} has zero norm, matrix is rank deficient")]
    ZeroColumn(usize),
    #[error("iterative diagonalization did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("matrix is rank deficient (sigma_min/sigma_max = {0:.3e})")]
    RankDeficient(f64),
    #[error("result too large: {0} entries exceeds the {1} entry guard")]
    TooLarge(usize, usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("bad dimension for sketch kind: {0}")]
    BadDimension(String),
    #[error("operation not supported for sketch kind {0}")]
    WrongKind(String),
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,
    #[error("non-finite entry at index {0}")]
    NonFinite(usize),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
