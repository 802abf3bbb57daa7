use legendre_flow::FlowError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),

    #[error("cannot read {path}: {source}")]
    Input { path: String, source: FlowError },

    #[error(transparent)]
    Flow(#[from] FlowError),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),

    #[error("bad JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 3 for a violated invariant, 2 for everything else (bad input,
    /// configuration or output location).
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 3,
            CliError::Flow(
                FlowError::InvariantViolation(_) | FlowError::GradientCollapse { .. } | FlowError::DegenerateState { .. },
            ) => 3,
            _ => 2,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
