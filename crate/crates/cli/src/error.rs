use std::path::PathBuf;

use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: line {line}, column {column}: {message}")]
    Parse { path: PathBuf, line: u64, column: String, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] tdacpd::Error),
    #[error("{0}")]
    Artifact(String),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse",
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Core(_) => "pipeline",
            CliError::Artifact(_) => "artifact",
        }
    }

    /// Single-line JSON description for machine consumers.
    pub fn to_json_line(&self) -> String {
        #[derive(Serialize)]
        struct Line<'a> {
            error: &'a str,
            message: String,
            #[serde(skip_serializing_if = "Option::is_none")]
            line: Option<u64>,
            #[serde(skip_serializing_if = "Option::is_none")]
            column: Option<&'a str>,
        }
        let (line, column) = match self {
            CliError::Parse { line, column, .. } => (Some(*line), Some(column.as_str())),
            _ => (None, None),
        };
        serde_json::to_string(&Line { error: self.kind(), message: self.to_string(), line, column })
            .expect("error line serializes")
    }
}
