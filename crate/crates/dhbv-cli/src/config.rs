//! The run configuration: one JSON file carrying everything a command
//! needs, with command-line flags taking precedence field by field.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use dhbv::training::TrainingConfig;

use crate::CliError;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalOptions {
    /// Basin-level baseflow-index reference CSV (`basin_id,bfi`).
    pub bfi_reference: Option<PathBuf>,
    /// Directory of per-basin ET composite CSVs (`period_start,et_mm_day`).
    pub et_reference: Option<PathBuf>,
    /// Also report the baseflow-index spatial correlation over basins with
    /// NSE above this threshold.
    pub nse_filter: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub manifest: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    pub threads: usize,
    pub train: TrainingConfig,
    pub eval: EvalOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            manifest: None,
            output_dir: None,
            checkpoint: None,
            threads: 1,
            train: TrainingConfig::default(),
            eval: EvalOptions::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<RunConfig, CliError> {
        match path {
            None => Ok(RunConfig::default()),
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Usage(format!("cannot read config {}: {e}", path.display()))
                })?;
                serde_json::from_str(&text).map_err(|e| {
                    CliError::Usage(format!("cannot parse config {}: {e}", path.display()))
                })
            }
        }
    }

    pub fn require_manifest(&self) -> Result<&Path, CliError> {
        self.manifest
            .as_deref()
            .ok_or_else(|| CliError::Usage("no dataset manifest given (--manifest)".into()))
    }

    pub fn require_output_dir(&self) -> Result<&Path, CliError> {
        self.output_dir
            .as_deref()
            .ok_or_else(|| CliError::Usage("no output directory given (--out)".into()))
    }

    pub fn require_checkpoint(&self) -> Result<&Path, CliError> {
        self.checkpoint
            .as_deref()
            .ok_or_else(|| CliError::Usage("no checkpoint given (--checkpoint)".into()))
    }
}
