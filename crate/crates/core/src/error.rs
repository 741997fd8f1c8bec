//! Crate-wide error type.

use std::path::PathBuf;

/// Diagnostic snapshot attached to a non-finite-loss abort.
#[derive(Debug, Clone)]
pub struct NanDiagnostic {
    pub epoch: usize,
    pub batch_index: usize,
    pub lambda: f64,
    pub difficulty_min: f64,
    pub difficulty_max: f64,
    pub difficulty_mean: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("schema error at line {line}: {message}")]
    Schema { line: usize, message: String },

    #[error("scheduling error: {0}")]
    Scheduling(String),

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error(
        "training aborted: non-finite loss in epoch {} batch {} (lambda={}, difficulty min/mean/max = {}/{}/{})",
        .0.epoch, .0.batch_index, .0.lambda, .0.difficulty_min, .0.difficulty_mean, .0.difficulty_max
    )]
    NonFiniteLoss(NanDiagnostic),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
