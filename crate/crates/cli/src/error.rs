use std::path::PathBuf;

use thiserror::Error;

/// Failures that stop a command before a report exists (exit code 2).
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot access {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("degree {max_r} exceeds the limit {limit} for {module}; lower --max-r")]
    DegreeTooLarge { module: String, max_r: u32, limit: u32 },
    #[error("degree {max_r} is below the first relevant degree {min} for {what}")]
    DegreeTooSmall { what: String, max_r: u32, min: u32 },
    #[error("{0}")]
    Computation(String),
    #[error("cannot write report: {0}")]
    Output(String),
}
