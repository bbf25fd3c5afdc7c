use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tls_core::pipeline::PipelineConfig;

use crate::error::{CliError, Result};

/// Everything a `run` or `knee-curve` invocation depends on. Serialized
/// verbatim into the run manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub dataset_dir: PathBuf,
    pub output_dir: PathBuf,
    /// Directory written by `train`; needed by regressor-scored methods.
    pub regressor_dir: Option<PathBuf>,
    /// Recorded for provenance only: the pipeline has no randomness.
    pub seed: u64,
    /// Worker threads; `None` lets the pool decide.
    pub jobs: Option<usize>,
    /// Also write `clusters.json` per topic for event methods.
    pub dump_clusters: bool,
    #[serde(flatten)]
    pub pipeline: PipelineConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dataset_dir: PathBuf::from("data"),
            output_dir: PathBuf::from("out"),
            regressor_dir: None,
            seed: 0,
            jobs: None,
            dump_clusters: false,
            pipeline: PipelineConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| CliError::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.pipeline.validate()?;
        if self.jobs == Some(0) {
            return Err(CliError::Config("jobs must be at least 1".into()));
        }
        if self.pipeline.method.needs_regressor() && self.regressor_dir.is_none() {
            return Err(CliError::Config(
                "method needs a regressor directory (run `train` first)".into(),
            ));
        }
        Ok(())
    }
}
