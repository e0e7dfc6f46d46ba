use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),

    /// An input file is missing or unreadable.
    #[error("cannot read {0}")]
    Input(String),

    #[error("cannot write {0}")]
    Output(String),

    #[error(transparent)]
    Core(#[from] bilinear_core::Error),
}

impl CliError {
    /// 2 for invalid input, 3 for numerical failures, 1 when an artifact
    /// cannot be written.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) | CliError::Input(_) => 2,
            CliError::Core(e) if e.is_validation() => 2,
            CliError::Core(_) => 3,
            CliError::Output(_) => 1,
        }
    }
}
