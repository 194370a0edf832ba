//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Numerically inconsistent input, e.g. a transfer matrix that fails
    /// the orthogonality check.
    #[error("inconsistent input: {0}")]
    Inconsistent(String),

    /// A gate action left the occupation basis; the result cannot be
    /// expressed as a signed occupation vector.
    #[error("not representable: {0}")]
    NotRepresentable(String),

    /// Requested matrix size outside the supported range.
    #[error("unsupported size: {0} (maximum 4)")]
    UnsupportedSize(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
