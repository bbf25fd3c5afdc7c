use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    NotFound(PathBuf),

    #[error("{}:{line}: {message}", file.display())]
    Parse {
        file: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid date {0:?}")]
    Date(String),

    #[error("corpus has no sentences")]
    EmptyCorpus,

    #[error("dataset has no topics with reference timelines")]
    EmptyDataset,

    #[error("regularized normal equations are singular")]
    SingularSystem,

    #[error("constraint c={c} outside 1..={len}")]
    BadConstraint { c: usize, len: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("knee detection needs at least 3 points, got {0}")]
    TooFewPoints(usize),

    #[error("timeline is empty")]
    EmptyTimeline,

    #[error("reference timeline is empty")]
    EmptyReference,

    #[error("scores are not sorted in descending order")]
    Unsorted,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::NotFound(path.into())
        } else {
            Error::Io {
                path: path.into(),
                source,
            }
        }
    }

    /// Short machine-readable name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotFound(_) => "NotFound",
            Error::Parse { .. } => "ParseError",
            Error::Date(_) => "DateError",
            Error::EmptyCorpus => "EmptyCorpus",
            Error::EmptyDataset => "EmptyDataset",
            Error::SingularSystem => "SingularSystem",
            Error::BadConstraint { .. } => "BadConstraint",
            Error::EmptyInput => "EmptyInput",
            Error::TooFewPoints(_) => "TooFewPoints",
            Error::EmptyTimeline => "EmptyTimeline",
            Error::EmptyReference => "EmptyReference",
            Error::Unsorted => "Unsorted",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::Io { .. } => "IoError",
        }
    }
}
