use std::path::PathBuf;

use thiserror::Error;

/// Errors shared by the sampling, estimation, and risk-simulation modules.
#[derive(Debug, Error)]
pub enum Error {
    /// A matrix or vector dimension is out of range (e.g. `p = 0`).
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    /// A distribution parameter violates its precondition (e.g. `df <= 0`,
    /// `nu < p`).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Input data violates a structural invariant (non-symmetric matrix,
    /// non-descending or non-positive spectrum, non-finite entries).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A configuration value is unusable (e.g. zero Monte Carlo points).
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// Two arguments that must agree in length or dimension do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A file could not be read or written; carries the offending path.
    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
