use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Record {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid data file {name}: {message}")]
    DataFile { name: String, message: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("length mismatch: {left} predictions vs {right} references")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("task {task}: requested {requested} test samples but only {available} are available")]
    SplitTooLarge {
        task: String,
        requested: usize,
        available: usize,
    },

    #[error("no discordant pairs")]
    NoDiscordantPairs,

    #[error("insufficient non-zero differences: {found} (need at least {required})")]
    InsufficientDifferences { found: usize, required: usize },

    #[error("missing ground truth for sample {0}")]
    MissingGroundTruth(String),

    #[error("sample {sample_id}: prediction task {predicted} does not match ground truth task {expected}")]
    TaskMismatch {
        sample_id: String,
        predicted: String,
        expected: String,
    },

    #[error("misaligned sample ids for task {task}: {detail}")]
    Misaligned { task: String, detail: String },

    #[error("task coverage mismatch: {0}")]
    CoverageMismatch(String),

    #[error("endpoint {endpoint} unreachable: {message}")]
    EndpointUnreachable { endpoint: String, message: String },

    #[error("endpoint {endpoint}: {message}")]
    Endpoint { endpoint: String, message: String },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by the inference server rather than the data.
    pub fn is_endpoint(&self) -> bool {
        matches!(
            self,
            Error::EndpointUnreachable { .. } | Error::Endpoint { .. }
        )
    }
}
