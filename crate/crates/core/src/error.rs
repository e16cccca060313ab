//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-contract input (non-finite data, empty dataset,
    /// ragged grid, point outside the evaluation chart, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Numerical degeneracy detected mid-computation (EM covariance left the
    /// positive-definite cone, a needed margin underflowed, ...).
    #[error("numerical degeneracy: {0}")]
    Degenerate(String),

    /// The solver could not deliver a usable root set even after fallback.
    #[error("solver failure: {0}")]
    SolverFailure(String),

    /// An exhaustive enumeration was requested beyond its hard size bound.
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }
}
