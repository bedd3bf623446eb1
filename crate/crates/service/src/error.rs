use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("session {0} not found")]
    NotFound(String),
    #[error("conflict: {0}")]
    Conflict(String),
    #[error("invalid request: {0}")]
    Validation(String),
    #[error("storage failure: {0}")]
    Storage(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl From<approval_core::Error> for ServiceError {
    fn from(e: approval_core::Error) -> Self {
        match e {
            approval_core::Error::Validation(m) | approval_core::Error::Parse(m) => ServiceError::Validation(m),
            other => ServiceError::Internal(other.to_string()),
        }
    }
}

impl From<std::io::Error> for ServiceError {
    fn from(e: std::io::Error) -> Self {
        ServiceError::Storage(e.to_string())
    }
}

pub type Result<T, E = ServiceError> = std::result::Result<T, E>;
