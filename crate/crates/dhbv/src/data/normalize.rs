//! Z-score normalization with train-split statistics, and the discharge
//! transform used by the low-flow loss term.

use serde::{Deserialize, Serialize};

use super::DataError;

/// Standard deviations are floored here so constant columns normalize to
/// zero instead of blowing up.
pub const STD_FLOOR: f64 = 1e-5;

/// Per-feature mean and standard deviation, computed on the training split
/// only and persisted with checkpoints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl NormStats {
    /// Fit from per-feature value collections.
    pub fn fit(columns: &[Vec<f64>]) -> NormStats {
        let mut mean = Vec::with_capacity(columns.len());
        let mut std = Vec::with_capacity(columns.len());
        for col in columns {
            assert!(!col.is_empty(), "cannot fit statistics on an empty column");
            let m = col.iter().sum::<f64>() / col.len() as f64;
            let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / col.len() as f64;
            mean.push(m);
            std.push(var.sqrt().max(STD_FLOOR));
        }
        NormStats { mean, std }
    }

    pub fn features(&self) -> usize {
        self.mean.len()
    }

    pub fn normalize(&self, feature: usize, v: f64) -> f64 {
        (v - self.mean[feature]) / self.std[feature]
    }

    pub fn denormalize(&self, feature: usize, z: f64) -> f64 {
        z * self.std[feature] + self.mean[feature]
    }
}

/// Discharge transform emphasizing low flows: `log10(sqrt(q) + 0.1)`.
pub fn flow_transform(q: f64) -> Result<f64, DataError> {
    if q < 0.0 {
        return Err(DataError::NegativeFlow { value: q });
    }
    Ok((q.sqrt() + 0.1).log10())
}

/// Inverse of [`flow_transform`], clamped at zero.
pub fn flow_transform_inv(t: f64) -> f64 {
    let root = 10f64.powf(t) - 0.1;
    (root.max(0.0)).powi(2)
}
