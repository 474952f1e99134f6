use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("not in canonical form: {0}")]
    NonCanonical(String),
    #[error("unsupported parameters: {0}")]
    Unsupported(String),
    #[error("truncation infeasible: |xi|/b^J = {ratio} exceeds 1/2")]
    TruncationInfeasible { ratio: f64 },
    #[error("refinement needed: {0}")]
    RefinementNeeded(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("out of range: {0}")]
    Range(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("normalization error: {0}")]
    Normalization(String),
    #[error("not representable: {0}")]
    NotRepresentable(String),
}

impl Error {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by budgets and limits rather than bad input.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
