use thiserror::Error;

/// Errors raised by the library. Decoding failures are *outcomes*, not errors.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("field degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: u8, right: u8 },

    #[error("unsupported field degree {0} (supported: 1..=64)")]
    UnsupportedDegree(u8),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("index {index} out of range (limit {limit})")]
    OutOfRange { index: String, limit: String },

    #[error("instance too large: {what} needs {required} but the cap is {cap}")]
    TooLarge {
        what: &'static str,
        required: String,
        cap: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
