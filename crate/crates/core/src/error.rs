//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A declared precondition does not hold for the supplied inputs.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Required metadata or configuration is missing or inconsistent.
    /// The message names the offending field or key.
    #[error("configuration error: {0}")]
    Config(String),

    /// Numerical routine could not reach its target accuracy.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Input/serialization problems (config files, dumps).
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
