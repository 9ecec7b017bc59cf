use thiserror::Error;

use crate::model::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("instance fails validation ({} violation(s))", .0.violations.len())]
    InvalidInstance(Box<ValidationReport>),

    #[error("malformed data: {0}")]
    Format(String),

    #[error("Bellman residual {residual:e} exceeds policy tolerance {tol:e}")]
    StaleCostVector { residual: f64, tol: f64 },

    #[error("closed loop left the feasible set at t = {step}: {detail}")]
    Infeasible { step: usize, detail: String },

    #[error("graph: {0}")]
    Graph(String),

    #[error("routing cycle through node {0}")]
    RouteCycle(u64),

    #[error("instance generator exhausted {0} retries")]
    RetriesExhausted(usize),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
