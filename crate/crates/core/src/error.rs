use thiserror::Error;

/// Errors raised by the exact-arithmetic, surface and positivity layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("mixed quadratic fields: sqrt({0}) and sqrt({1})")]
    MixedField(u64, u64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("representation error: {0}")]
    Representation(String),
    #[error("oracle unavailable: {0}")]
    OracleUnavailable(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("parse error in `{field}`: {message}")]
    Parse { field: String, message: String },
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },
}

impl Error {
    pub fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
