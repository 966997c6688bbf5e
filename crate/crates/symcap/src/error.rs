//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Matrix or body dimension is inconsistent or odd where 2n is required.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// Input violates a mathematical precondition (not positive definite,
    /// not symmetric, origin not interior, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A computation failed to reach the requested accuracy.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Malformed configuration, body spec, or CLI input.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
