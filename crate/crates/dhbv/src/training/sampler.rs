//! Minibatch sampling: uniform random basins (distinct when the dataset has
//! enough, with replacement otherwise) paired with uniform random window
//! starts whose warm-up still fits inside the training period.

use rand::RngExt;
use rand_chacha::ChaCha8Rng;

use crate::data::Dataset;

use super::{TrainError, TrainingConfig};

/// One sampled window: the basin index and the axis index of the first loss
/// day (the warm-up occupies the preceding `warmup_days`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindowSample {
    pub basin: usize,
    pub start: usize,
}

pub fn sample_minibatch(
    dataset: &Dataset,
    cfg: &TrainingConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<WindowSample>, TrainError> {
    let train_start = dataset
        .index_of(cfg.train_start)
        .ok_or(TrainError::NoValidWindows)?;
    let train_end = dataset
        .index_of(cfg.train_end)
        .ok_or(TrainError::NoValidWindows)?;
    let lo = train_start + cfg.warmup_days;
    let hi = (train_end + 1).checked_sub(cfg.window_days);
    let Some(hi) = hi else {
        return Err(TrainError::NoValidWindows);
    };
    if lo > hi {
        return Err(TrainError::NoValidWindows);
    }

    let n = dataset.n_basins();
    let b = cfg.batch_basins;
    let basins: Vec<usize> = if n >= b {
        // Partial Fisher-Yates: first `b` entries of a seeded shuffle.
        let mut idx: Vec<usize> = (0..n).collect();
        for i in 0..b {
            let j = i + rng.random_range(0..(n - i));
            idx.swap(i, j);
        }
        idx.truncate(b);
        idx
    } else {
        (0..b).map(|_| rng.random_range(0..n)).collect()
    };

    Ok(basins
        .into_iter()
        .map(|basin| WindowSample {
            basin,
            start: rng.random_range(lo..=hi),
        })
        .collect())
}
