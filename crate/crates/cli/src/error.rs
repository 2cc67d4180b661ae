use fermatlab_core::jets::JetError;
use fermatlab_core::nevanlinna::NevanlinnaError;
use fermatlab_core::solutions::SolutionError;
use thiserror::Error;

use crate::sexpr::SexprError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("truncation exhausted: {0}")]
    Truncation(String),
    #[error("quadrature budget exhausted: {0}")]
    Budget(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit code.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parameter(_) | CliError::Io(_) => 2,
            CliError::Schema(_) => 3,
            CliError::Truncation(_) => 4,
            CliError::Budget(_) => 5,
        }
    }
}

impl From<SexprError> for CliError {
    fn from(e: SexprError) -> Self {
        CliError::Schema(format!("expression: {e}"))
    }
}

impl From<SolutionError> for CliError {
    fn from(e: SolutionError) -> Self {
        match e {
            SolutionError::UnknownFamily(_) => CliError::Schema(e.to_string()),
            _ => CliError::Parameter(e.to_string()),
        }
    }
}

impl From<JetError> for CliError {
    fn from(e: JetError) -> Self {
        match e {
            JetError::TruncationExhausted(_) => CliError::Truncation(e.to_string()),
            _ => CliError::Parameter(e.to_string()),
        }
    }
}

impl From<NevanlinnaError> for CliError {
    fn from(e: NevanlinnaError) -> Self {
        match e {
            NevanlinnaError::QuadratureBudgetExceeded(_) => CliError::Budget(e.to_string()),
            _ => CliError::Parameter(e.to_string()),
        }
    }
}
