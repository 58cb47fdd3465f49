//! Text corpus, append-only game logs, replay and CSV export.

pub mod corpus;
pub mod export;
pub mod log;
pub mod replay;

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PersistError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("the corpus contains no texts")]
    EmptyCorpus,
    #[error("{entry}: {reason}")]
    SchemaError { entry: String, reason: String },
    #[error("log record {0} is unreadable")]
    CorruptLog(u64),
    #[error("replay diverged from the log at record {0}")]
    HashMismatch(u64),
    #[error("csv export failed: {0}")]
    Csv(#[from] csv::Error),
}

impl PersistError {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> PersistError {
        let path = path.into();
        move |source| PersistError::Io { path, source }
    }
}
