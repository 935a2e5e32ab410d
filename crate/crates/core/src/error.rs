use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unsupported moment: {0}")]
    UnsupportedMoment(String),

    #[error("empirical distribution needs at least one finite sample")]
    EmptySample,

    #[error("sample contains a non-finite value at index {index}")]
    NonFiniteSample { index: usize },

    #[error("{variant} model is not allowed here: {reason}")]
    WrongVariant { variant: &'static str, reason: &'static str },

    #[error("config line {line}: key `{key}`: {reason}")]
    Config { line: usize, key: String, reason: String },

    #[error("naive run refused: expected {expected:.3e} vector draws exceeds the global budget of {budget:.3e}")]
    BudgetExceeded { expected: f64, budget: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    pub(crate) fn config(line: usize, key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config { line, key: key.into(), reason: reason.into() }
    }
}
