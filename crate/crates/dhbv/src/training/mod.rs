//! End-to-end training: minibatch sampling over basins and windows, a
//! no-gradient warm-up pass for both the recurrent network state and the
//! water stores, the differentiable window simulation with routing, the
//! composite RMSE loss, optimizer updates, and checkpointing.

mod checkpoint;
mod infer;
mod loss;
mod optimizer;
mod sampler;
mod trainer;

pub use checkpoint::{Checkpoint, LossRow, NamedMat, NormBundle, CHECKPOINT_VERSION};
pub use infer::{predict, Prediction, PredictionFlow};
pub use loss::{compute_loss, composite_loss_on_tape, LossTerms};
pub use optimizer::{Optimizer, OptimizerKind, OptimizerState};
pub use sampler::{sample_minibatch, WindowSample};
pub use trainer::{train, TrainOutcome};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{DataError, Dataset};
use crate::hbv::{HbvError, ModelVariant, ParamRanges};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// The process-based model with learned parameterization.
    Hbv,
    /// The purely data-driven LSTM streamflow baseline.
    LstmBenchmark,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainingConfig {
    pub model: ModelKind,
    pub variant: ModelVariant,
    pub batch_basins: usize,
    pub window_days: usize,
    pub warmup_days: usize,
    pub alpha: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub optimizer: OptimizerKind,
    pub clip_norm: Option<f64>,
    pub hidden_size: usize,
    pub nnr_hidden: Vec<usize>,
    pub seed: u64,
    pub train_start: NaiveDate,
    pub train_end: NaiveDate,
    pub test_start: NaiveDate,
    pub test_end: NaiveDate,
    pub param_ranges: ParamRanges,
    pub routing_days: usize,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            model: ModelKind::Hbv,
            variant: ModelVariant::DeltaGammaBeta,
            batch_basins: 100,
            window_days: 365,
            warmup_days: 365,
            alpha: 0.25,
            epochs: 50,
            learning_rate: 1e-3,
            optimizer: OptimizerKind::Adam,
            clip_norm: Some(1.0),
            hidden_size: 256,
            nnr_hidden: vec![16, 16],
            seed: 42,
            train_start: NaiveDate::from_ymd_opt(1980, 10, 1).unwrap(),
            train_end: NaiveDate::from_ymd_opt(1995, 9, 30).unwrap(),
            test_start: NaiveDate::from_ymd_opt(1995, 10, 1).unwrap(),
            test_end: NaiveDate::from_ymd_opt(2010, 9, 30).unwrap(),
            param_ranges: ParamRanges::default(),
            routing_days: 15,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self, dataset: &Dataset) -> Result<(), TrainError> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(TrainError::Config(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        if self.batch_basins == 0 || self.window_days == 0 || self.epochs == 0 {
            return Err(TrainError::Config(
                "batch size, window length, and epochs must be positive".into(),
            ));
        }
        if self.hidden_size == 0 {
            return Err(TrainError::Config("hidden size must be positive".into()));
        }
        if self.train_end < self.train_start {
            return Err(TrainError::Config("training period is reversed".into()));
        }
        let start_idx = dataset.index_of(self.train_start).ok_or_else(|| {
            TrainError::Config(format!("train_start {} outside the dataset", self.train_start))
        })?;
        let end_idx = dataset.index_of(self.train_end).ok_or_else(|| {
            TrainError::Config(format!("train_end {} outside the dataset", self.train_end))
        })?;
        let train_days = end_idx - start_idx + 1;
        if train_days < self.window_days + self.warmup_days {
            return Err(TrainError::Config(format!(
                "training period has {train_days} days; window plus warm-up needs {}",
                self.window_days + self.warmup_days
            )));
        }
        Ok(())
    }

    /// Iterations per epoch: one epoch nominally exposes every basin-day
    /// once.
    pub fn iterations_per_epoch(&self, dataset: &Dataset) -> usize {
        let start_idx = dataset.index_of(self.train_start).unwrap_or(0);
        let end_idx = dataset
            .index_of(self.train_end)
            .unwrap_or(dataset.len() - 1);
        let train_days = end_idx - start_idx + 1;
        let work = dataset.n_basins() * train_days;
        let per_iter = self.batch_basins * self.window_days;
        work.div_ceil(per_iter)
    }
}

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("no valid training windows inside the training period")]
    NoValidWindows,
    #[error("iteration {iteration}: no valid observations in the sampled windows")]
    NoValidObservations { iteration: usize },
    #[error("iteration {iteration}: non-finite loss (basins {basins:?})")]
    NonFiniteLoss {
        iteration: usize,
        basins: Vec<String>,
    },
    #[error("non-finite gradient for parameter {param}")]
    NonFiniteGradient { param: String },
    #[error(transparent)]
    Hbv(#[from] HbvError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("checkpoint {path}: {detail}")]
    Checkpoint { path: String, detail: String },
    #[error("{0}")]
    Inference(String),
}
