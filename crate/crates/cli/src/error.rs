use std::path::PathBuf;

use serde_json::json;
use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{source}")]
    Core {
        topic: Option<String>,
        #[source]
        source: tls_core::Error,
    },

    #[error("leave-one-topic-out training needs at least 2 topics, found {0}")]
    InsufficientTopics(usize),

    #[error("no prediction for topic {topic:?}, reference {reference:?}")]
    MissingPrediction { topic: String, reference: String },

    #[error("unknown topic {0:?}")]
    UnknownTopic(String),

    #[error("no regressor for topic {topic:?} at {}", path.display())]
    MissingRegressor { topic: String, path: PathBuf },

    #[error("regressor for topic {0:?} was trained on that topic")]
    TopicLeak(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl From<tls_core::Error> for CliError {
    fn from(source: tls_core::Error) -> Self {
        CliError::Core {
            topic: None,
            source,
        }
    }
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core { source, .. } => source.kind(),
            CliError::InsufficientTopics(_) => "InsufficientTopics",
            CliError::MissingPrediction { .. } => "MissingPrediction",
            CliError::UnknownTopic(_) => "UnknownTopic",
            CliError::MissingRegressor { .. } => "MissingRegressor",
            CliError::TopicLeak(_) => "TopicLeak",
            CliError::Config(_) => "InvalidConfig",
            CliError::Io { .. } => "IoError",
            CliError::Json { .. } => "JsonError",
            CliError::Csv(_) => "CsvError",
        }
    }

    pub fn topic(&self) -> Option<&str> {
        match self {
            CliError::Core { topic, .. } => topic.as_deref(),
            CliError::MissingPrediction { topic, .. }
            | CliError::MissingRegressor { topic, .. }
            | CliError::TopicLeak(topic)
            | CliError::UnknownTopic(topic) => Some(topic),
            _ => None,
        }
    }

    /// Structured form printed on failure.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({ "error": self.kind(), "message": self.to_string() });
        if let Some(t) = self.topic() {
            v["topic"] = json!(t);
        }
        v
    }
}

/// Attaches a topic name to core errors.
pub(crate) trait TopicContext<T> {
    fn in_topic(self, topic: &str) -> Result<T>;
}

impl<T> TopicContext<T> for std::result::Result<T, tls_core::Error> {
    fn in_topic(self, topic: &str) -> Result<T> {
        self.map_err(|source| CliError::Core {
            topic: Some(topic.to_string()),
            source,
        })
    }
}
