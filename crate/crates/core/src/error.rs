use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed manifest {path}: {message}")]
    Manifest { path: PathBuf, message: String },

    #[error("topic {topic_id:?} has no documents")]
    EmptyTopic { topic_id: String },

    #[error("document {doc_id:?} in topic {topic_id:?}: {message}")]
    Document {
        topic_id: String,
        doc_id: String,
        message: String,
    },

    #[error("insufficient vocabulary in topic {topic_id:?}: need {needed} distinct terms, found {found}")]
    InsufficientVocabulary {
        topic_id: String,
        needed: usize,
        found: usize,
    },

    #[error("no topics")]
    NoTopics,

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by the input collection rather than usage.
    pub fn is_corpus_error(&self) -> bool {
        !matches!(self, Error::InvalidArgument(_))
    }
}
