//! Error type shared by every module in the crate.

use thiserror::Error;

/// Crate-wide error type.
///
/// The variants map onto the runner's exit-code contract: configuration
/// problems, numerical failures, and I/O are kept distinct so callers can
/// react differently to each.
#[derive(Debug, Error)]
pub enum Error {
    /// A function argument violated its documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A grid function or density contained NaN/inf where a finite value is required.
    #[error("non-finite input: {0}")]
    NonFinite(String),

    /// Experiment or family configuration failed validation.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A computation produced a value outside its valid range (log of zero,
    /// NaN risk during a search, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
