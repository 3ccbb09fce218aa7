use thiserror::Error;

#[derive(Debug, Error)]
pub enum HmsError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("grade error: {0}")]
    Grade(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid torus: {0}")]
    InvalidTorus(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("node budget of {budget} candidates exceeded after {explored} evaluations (reached L1 level {level})")]
    BudgetExceeded { budget: u64, explored: u64, level: u64 },

    #[error("mirror recovery failed in block {block}: {detail}")]
    Recovery { block: String, detail: String },

    #[error("truncation: {0}")]
    Truncation(String),

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = HmsError> = std::result::Result<T, E>;
