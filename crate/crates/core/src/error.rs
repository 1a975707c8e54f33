use thiserror::Error;

/// Errors raised by the value types and the certificate codec.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoreError {
    #[error("malformed input at line {line}, column {column}: {message}")]
    Malformed {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}
