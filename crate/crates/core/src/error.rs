//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised by cloud construction, invariants, metrics and IO.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Distances cannot be realized by any point configuration in the
    /// requested dimension.
    #[error("non-embeddable input: {0}")]
    NonEmbeddable(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Reconstruction cannot pick a unique answer (e.g. basis of too low
    /// affine dimension).
    #[error("ambiguous input: {0}")]
    Ambiguous(String),

    /// Inputs live in incompatible spaces (different point count or
    /// ambient dimension).
    #[error("incomparable inputs: {0}")]
    Incomparable(String),

    #[error("integer overflow: {0}")]
    Overflow(String),

    /// Brute-force search refused because the instance exceeds its size cap.
    #[error("input too large: {0}")]
    TooLarge(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
