use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported field size q={0} (supported: 2, 3, 4, 5, 7, 8, 9, 13, 16)")]
    UnsupportedField(u16),

    #[error("inversion of zero in GF({0})")]
    ZeroInverse(u16),

    #[error("elements belong to different fields (GF({0}) vs GF({1}))")]
    FieldMismatch(u16, u16),

    #[error("{0}")]
    Domain(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("index {index} out of range (limit {limit})")]
    OutOfRange { index: usize, limit: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("resource budget exceeded: {0}")]
    Budget(String),

    #[error("contract violated: {0}")]
    Contract(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, message: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
