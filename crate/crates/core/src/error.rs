use thiserror::Error;

pub type Result<T> = std::result::Result<T, MfgError>;

#[derive(Debug, Error)]
pub enum MfgError {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("barL undefined: beta*K1/2 = {value} >= 1 (beta = {beta}, K1 = {k1})")]
    BarLUndefined { beta: f64, k1: f64, value: f64 },

    #[error("no convergence after {iterations} iterations, last residual {residual:e}{detail}")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
        detail: String,
    },

    #[error("root search failed: {0}")]
    Search(String),

    #[error("condition not satisfied: {0}")]
    Condition(String),

    #[error("instance generation failed: {0}")]
    Generation(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl MfgError {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            MfgError::Input(_)
            | MfgError::Dimension(_)
            | MfgError::Io(_)
            | MfgError::Json(_) => 2,
            MfgError::NonConvergence { .. } | MfgError::Search(_) => 3,
            MfgError::BarLUndefined { .. }
            | MfgError::Condition(_)
            | MfgError::Generation(_) => 4,
        }
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        MfgError::Input(msg.into())
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        MfgError::Dimension(msg.into())
    }
}
