use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WittError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("polynomial is not a p-th power")]
    NotAPthPower,
    #[error("not in the image of the embedding: {0}")]
    NotInImage(String),
    #[error("probe table does not come from an operator: {0}")]
    NotAnOperator(String),
    #[error("degree budget of the working context exceeded: {0}")]
    ContextOverflow(String),
    #[error("no polynomial fit within the degree bound: {0}")]
    NoFit(String),
    #[error("iteration does not converge: {0}")]
    ConvergenceFailure(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, WittError>;

impl WittError {
    /// Stable integer code, shared with the C interface.
    pub fn code(&self) -> i32 {
        match self {
            WittError::InvalidInput(_) => 1,
            WittError::NotAPthPower => 2,
            WittError::NotInImage(_) => 3,
            WittError::NotAnOperator(_) => 4,
            WittError::ContextOverflow(_) => 5,
            WittError::NoFit(_) => 6,
            WittError::ConvergenceFailure(_) => 7,
            WittError::Parse(_) => 8,
        }
    }
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(WittError::InvalidInput(msg.into()))
}
