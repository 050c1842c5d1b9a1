use thiserror::Error;

use softpart_core::Error as CoreError;

/// Command failure with its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid configuration or a failed check (exit 2).
    #[error("{0}")]
    Validation(String),
    /// Solver, synthesis, realizability or packing failure (exit 3).
    #[error("{0}")]
    Numerical(String),
    /// Unreadable or malformed files (exit 4).
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub fn io(msg: impl Into<String>) -> Self {
        CliError::Io(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::Config(_) | CoreError::GridMismatch(_) => CliError::Validation(msg),
            CoreError::Parse { .. } | CoreError::Io(_) => CliError::Io(msg),
            CoreError::SingularArgument
            | CoreError::SolverFailure { .. }
            | CoreError::SynthesisFailure { .. }
            | CoreError::Realizability { .. }
            | CoreError::Packing { .. }
            | CoreError::SingularImpedance => CliError::Numerical(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
