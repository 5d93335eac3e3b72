//! Error type shared across the crate.

use thiserror::Error;

/// Errors raised by library operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Vector or grid dimensions do not line up.
    #[error("dimension error: {0}")]
    Dimension(String),
    /// A scalar argument is outside its allowed range.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// An input value violates a precondition (non-finite, empty, ...).
    #[error("input error: {0}")]
    Input(String),
    /// A dataset row, label, or batch is malformed.
    #[error("data error: {0}")]
    Data(String),
    /// A configuration value is inconsistent with the data it applies to.
    #[error("config error: {0}")]
    Config(String),
    /// A computation produced a non-finite intermediate.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// Grid sampling hit a cell where evaluation failed.
    #[error("sampling error: {0}")]
    Sampling(String),
}

pub type Result<T> = std::result::Result<T, Error>;
