use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot parse experiment file: {0}")]
    Parse(String),
    #[error("invalid experiment: {0}")]
    Validation(String),
    #[error("scenario {index} ({kind}) failed: {source}")]
    Compute {
        index: usize,
        kind: &'static str,
        #[source]
        source: gsr_core::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("json output: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
