use thiserror::Error;

/// Errors raised by the voting and analysis machinery.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Inputs are inconsistent with the election model (length mismatch, k out of range, bad parameters).
    #[error("model error: {0}")]
    Model(String),
    /// A heuristic is undefined for the given utilities.
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested enumeration is too large to carry out exactly.
    #[error("resource error: {0}")]
    Resource(String),
    /// A document could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
    /// A parsed document violates an invariant.
    #[error("validation error: {0}")]
    Validation(String),
    /// Input data refers to something that does not exist.
    #[error("data error: {0}")]
    Data(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn model(msg: impl Into<String>) -> Error {
    Error::Model(msg.into())
}
