use std::path::Path;

use thiserror::Error;
use ysqht_core::io::LogError;

/// Failures mapped onto the exit-code protocol.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Corrupt(String),
    #[error("{0}")]
    Version(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 4,
            CliError::Corrupt(_) => 5,
            CliError::Version(_) => 6,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }

    pub fn from_log(path: &Path, err: LogError) -> Self {
        match err {
            LogError::Io(source) => CliError::io(path, source),
            LogError::Corrupt { .. } => CliError::Corrupt(format!("{}: {err}", path.display())),
            LogError::Version(_) => CliError::Version(format!("{}: {err}", path.display())),
        }
    }
}

impl From<ysqht_core::Error> for CliError {
    fn from(err: ysqht_core::Error) -> Self {
        CliError::Usage(err.to_string())
    }
}
