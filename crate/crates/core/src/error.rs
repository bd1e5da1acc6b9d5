use thiserror::Error;

/// Errors raised by the engine. Every precondition violation maps onto one
/// of these variants; nothing is silently coerced.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("degree error: {0}")]
    Degree(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("truncation overflow: {0}")]
    Truncation(String),
    #[error("not integrable: {0}")]
    NotIntegrable(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    /// Shift the line of a parse error, used when an expression is embedded
    /// in a larger file.
    pub fn at_line(self, line: usize) -> Self {
        match self {
            Error::Parse {
                column, message, ..
            } => Error::Parse {
                line,
                column,
                message,
            },
            other => other,
        }
    }
}
