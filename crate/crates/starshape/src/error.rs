//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value violates a precondition.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A numerical procedure failed to converge or detected an
    /// inconsistency it cannot recover from.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Bandwidth selection could not produce a finite score for any
    /// candidate; the caller should widen the candidate grid.
    #[error("bandwidth selection failed: {0}")]
    Selection(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A data file could not be parsed.
    #[error("parse error at {location}: {message}")]
    Parse {
        /// `file:line` or `file:line:column` of the offending input.
        location: String,
        /// Description of what went wrong.
        message: String,
    },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
