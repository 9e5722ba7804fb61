use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration or violated physical precondition (exit code 2).
    #[error("configuration error: {0}")]
    Config(String),
    /// Failure inside a computation (exit code 1).
    #[error("computation error: {0}")]
    Compute(#[from] qwnlab_core::Error),
    #[error("io error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Compute(_) | CliError::Io(_) => 1,
        }
    }
}

/// Core errors raised while re-validating inputs before dispatch.
pub fn invalid(err: qwnlab_core::Error) -> CliError {
    CliError::Config(err.to_string())
}
