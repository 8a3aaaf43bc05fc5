use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] fano_forge::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("{0} record(s) failed verification")]
    VerifyFailed(usize),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    /// 2 verification failure, 3 resource cap, 4 I/O or unreadable input, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed(_) => 2,
            CliError::Core(fano_forge::Error::ResourceCap { .. }) | CliError::Core(fano_forge::Error::DimensionCap(..)) => 3,
            CliError::Io { .. } | CliError::Parse { .. } => 4,
            CliError::Core(_) | CliError::Usage(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
