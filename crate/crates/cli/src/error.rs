use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    BadFile { path: PathBuf, message: String },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: String,
        source: trendscape::Error,
    },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn stage(stage: impl Into<String>) -> impl FnOnce(trendscape::Error) -> Self {
        let stage = stage.into();
        move |source| CliError::Stage { stage, source }
    }

    /// 2 for bad input or usage, 3 for numerical failures inside a stage.
    pub fn exit_code(&self) -> i32 {
        use trendscape::Error as E;
        match self {
            CliError::Stage { source, .. } => match source {
                E::Numerical(_) | E::UndefinedScore(_) | E::InvalidFiltration(_) => 3,
                _ => 2,
            },
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
