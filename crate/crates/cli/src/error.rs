use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Numerical(kglab::Error),
    #[error("{0}")]
    Library(kglab::Error),
    #[error("verification failed: {0}")]
    Failed(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl From<kglab::Error> for CliError {
    fn from(e: kglab::Error) -> Self {
        match e {
            kglab::Error::NumericalAbort { .. } => CliError::Numerical(e),
            other => CliError::Library(other),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl CliError {
    /// 2 for bad input, 3 for numerical aborts, 1 for failed sweeps and I/O.
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) | CliError::Library(_) => ExitCode::from(2),
            CliError::Numerical(_) => ExitCode::from(3),
            CliError::Failed(_) | CliError::Io(_) => ExitCode::from(1),
        }
    }
}
