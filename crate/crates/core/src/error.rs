use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not symplectic: max |MᵀJM − J| entry is {defect:.3e}")]
    NotSymplectic { defect: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid angle: {0}")]
    InvalidAngle(String),
    #[error("invalid normal form: {0}")]
    InvalidForm(String),
    #[error("decomposition invariant violated: {0}")]
    Decomposition(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("oracle failure: {0}")]
    Oracle(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// True for failures that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
