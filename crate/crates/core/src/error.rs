use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WmiError {
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("undeclared variable `{0}`")]
    UndeclaredVariable(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("size mismatch: expected {expected} values, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("capacity exceeded: {what} is {actual}, limit {limit}")]
    Capacity {
        what: &'static str,
        limit: u64,
        actual: u64,
    },

    #[error("backend unavailable: {0}")]
    BackendUnavailable(String),

    #[error("negative weight {value} at {at}")]
    NegativeWeight { value: String, at: String },

    #[error("not a probability density: total mass {0}")]
    NotPdf(String),
}

impl WmiError {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        WmiError::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    /// Capacity and backend errors are resource limits rather than bad input.
    pub fn is_capacity(&self) -> bool {
        matches!(
            self,
            WmiError::Capacity { .. } | WmiError::BackendUnavailable(_)
        )
    }
}

pub type Result<T, E = WmiError> = std::result::Result<T, E>;
