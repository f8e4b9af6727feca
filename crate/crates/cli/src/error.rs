use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Input(#[from] xlemo::Error),
}

impl CliError {
    /// 2 for usage errors, 4 for numeric failures, 3 for everything else.
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 2,
            CliError::Input(e) if e.is_numeric() => 4,
            CliError::Input(_) => 3,
        })
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(e.into())
    }
}
