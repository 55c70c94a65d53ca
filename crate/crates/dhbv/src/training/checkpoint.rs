//! Versioned JSON checkpoints: weights, normalization statistics, the
//! categorical vocabulary, a configuration echo, optimizer state, and the
//! full loss history. Serialization is deterministic, so identical runs
//! produce byte-identical files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::autodiff::Mat;
use crate::data::{CategoricalVocab, NormStats};

use super::{TrainError, TrainingConfig};

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedMat {
    pub name: String,
    pub mat: Mat,
}

/// Normalization statistics fitted on the training split.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormBundle {
    /// Per forcing variable: precipitation, temperature, potential ET.
    pub forcing: NormStats,
    /// Per attribute column.
    pub attributes: NormStats,
    /// Transformed-flow statistics, present for the data-driven baseline.
    pub flow: Option<NormStats>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossRow {
    pub iteration: usize,
    pub epoch: usize,
    pub loss: f64,
    pub plain: f64,
    pub transformed: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub config: TrainingConfig,
    /// Completed epochs.
    pub epoch: usize,
    pub seed: u64,
    pub norm: NormBundle,
    pub vocab: CategoricalVocab,
    pub weights: Vec<NamedMat>,
    pub optimizer: Option<super::OptimizerState>,
    pub loss_history: Vec<LossRow>,
}

impl Checkpoint {
    pub fn save(&self, path: &Path) -> Result<(), TrainError> {
        let text = serde_json::to_string(self).map_err(|e| TrainError::Checkpoint {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        std::fs::write(path, text).map_err(|e| TrainError::Checkpoint {
            path: path.display().to_string(),
            detail: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Checkpoint, TrainError> {
        let text = std::fs::read_to_string(path).map_err(|e| TrainError::Checkpoint {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        let ckpt: Checkpoint = serde_json::from_str(&text).map_err(|e| TrainError::Checkpoint {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        if ckpt.version != CHECKPOINT_VERSION {
            return Err(TrainError::Checkpoint {
                path: path.display().to_string(),
                detail: format!(
                    "version {} unsupported (expected {CHECKPOINT_VERSION})",
                    ckpt.version
                ),
            });
        }
        Ok(ckpt)
    }

    pub fn weight(&self, name: &str) -> Result<&Mat, TrainError> {
        self.weights
            .iter()
            .find(|w| w.name == name)
            .map(|w| &w.mat)
            .ok_or_else(|| TrainError::Checkpoint {
                path: "<loaded>".into(),
                detail: format!("missing weight '{name}'"),
            })
    }

    /// Write the loss history as the trace CSV next to the checkpoint
    /// contract: `iteration,epoch,loss,plain_rmse,transformed_rmse`.
    pub fn write_trace_csv(&self, path: &Path) -> Result<(), TrainError> {
        use std::io::Write;
        let err = |e: std::io::Error| TrainError::Checkpoint {
            path: path.display().to_string(),
            detail: e.to_string(),
        };
        let mut f = std::fs::File::create(path).map_err(err)?;
        writeln!(f, "iteration,epoch,loss,plain_rmse,transformed_rmse").map_err(err)?;
        for row in &self.loss_history {
            writeln!(
                f,
                "{},{},{},{},{}",
                row.iteration, row.epoch, row.loss, row.plain, row.transformed
            )
            .map_err(err)?;
        }
        Ok(())
    }
}
