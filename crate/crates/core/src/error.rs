use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("division by zero in field")]
    DivisionByZero,

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("threshold not met: need {needed} shares, got {got}")]
    Threshold { needed: usize, got: usize },

    #[error("colluders can reconstruct: {colluders} colluders with threshold {threshold}")]
    ColludersCanReconstruct { colluders: usize, threshold: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("state space too large: {size} entries exceeds cap {cap}")]
    StateSpaceTooLarge { size: u128, cap: u64 },

    #[error("iteration did not converge after {iterations} iterations (gap {gap:e})")]
    NotConverged { iterations: usize, gap: f64 },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
