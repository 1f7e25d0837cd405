use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("window overflow: {left} * {right} leaves the degree window")]
    WindowOverflow { left: String, right: String },
    #[error("malformed algebra: {0}")]
    Malformed(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("size cap exceeded: dimension {dim} > cap {cap} ({what})")]
    SizeCap { what: String, dim: usize, cap: usize },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("parity mismatch: {0}")]
    Parity(String),
}

impl Error {
    pub(crate) fn parse(message: impl Into<String>) -> Error {
        Error::Parse { line: 1, column: 1, message: message.into() }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Error {
        Error::Invalid(message.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
