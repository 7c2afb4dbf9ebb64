use std::path::PathBuf;

use thiserror::Error;

use crate::config::Violation;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {}", join(.0))]
    Config(Vec<Violation>),
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] entperc_core::Error),
    #[error("cannot encode manifest: {0}")]
    Json(#[from] serde_json::Error),
}

fn join(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl CliError {
    /// Keys named by a config error, empty for other errors.
    pub fn keys(&self) -> Vec<&str> {
        match self {
            CliError::Config(v) => v.iter().map(|x| x.key.as_str()).collect(),
            _ => Vec::new(),
        }
    }
}
