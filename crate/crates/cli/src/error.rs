use std::path::{Path, PathBuf};

use slate_core::agent::{EpisodeError, RegistryError, ReplayError, TrajectoryError};
use slate_core::parser::ParseDiagnostic;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const USAGE: u8 = 2;
    pub const BUDGET_EXHAUSTED: u8 = 3;
    pub const SOLVER_FAILURE: u8 = 4;
    pub const IO_OR_CONFIG: u8 = 5;
    pub const DIGEST_MISMATCH: u8 = 6;
    pub const INVALID_FRAGMENT: u8 = 7;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Config { path: PathBuf, message: String },
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error(transparent)]
    Episode(#[from] EpisodeError),
    #[error("{}: {source}", path.display())]
    Trajectory {
        path: PathBuf,
        #[source]
        source: TrajectoryError,
    },
    #[error(transparent)]
    Replay(#[from] ReplayError),
    #[error("{0}")]
    InvalidFragment(ParseDiagnostic),
}

impl CliError {
    pub fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
        move |source| CliError::Io {
            path: path.to_owned(),
            source,
        }
    }

    pub fn config(path: &Path, message: impl Into<String>) -> CliError {
        CliError::Config {
            path: path.to_owned(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Replay(ReplayError::DigestMismatch { .. } | ReplayError::AcceptanceMismatch { .. }) => {
                exit::DIGEST_MISMATCH
            }
            CliError::InvalidFragment(_) => exit::INVALID_FRAGMENT,
            CliError::Episode(EpisodeError::InvalidTask(_)) => exit::INVALID_FRAGMENT,
            _ => exit::IO_OR_CONFIG,
        }
    }
}
