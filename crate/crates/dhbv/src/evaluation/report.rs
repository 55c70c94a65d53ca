//! Per-basin metric rows, the summary, and the report files:
//! `per_basin_metrics.csv`, `summary.json`, and `nse_cdf.csv`.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::metrics::bfi_spatial_correlation;
use super::EvalError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasinMetrics {
    pub basin_id: String,
    pub nse: f64,
    pub rmse: f64,
    pub flow_correlation: f64,
    pub bfi_sim: Option<f64>,
    pub bfi_ref: Option<f64>,
    pub et_correlation: Option<f64>,
    pub et_rmse_mm_8day: Option<f64>,
    pub mean_et_mm_day: Option<f64>,
    pub mean_et_ref_mm_day: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n_basins: usize,
    pub median_nse: f64,
    pub bfi_spatial_r: Option<f64>,
    /// Same correlation restricted to basins above the NSE filter, when a
    /// filter was requested.
    pub bfi_spatial_r_filtered: Option<f64>,
    pub nse_filter: Option<f64>,
    pub median_et_correlation: Option<f64>,
    pub median_et_rmse_mm_8day: Option<f64>,
    /// Spatial correlation of long-term mean ET against the reference.
    pub et_mean_spatial_r: Option<f64>,
}

pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty set");
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Aggregate per-basin metrics. `nse_filter` additionally reports the BFI
/// spatial correlation over basins with NSE above the threshold.
pub fn summarize(metrics: &[BasinMetrics], nse_filter: Option<f64>) -> Result<Summary, EvalError> {
    if metrics.is_empty() {
        return Err(EvalError::TooFewBasins { needed: 1, got: 0 });
    }
    let nse_values: Vec<f64> = metrics.iter().map(|m| m.nse).collect();

    let bfi_sim: Vec<Option<f64>> = metrics.iter().map(|m| m.bfi_sim).collect();
    let bfi_ref: Vec<Option<f64>> = metrics.iter().map(|m| m.bfi_ref).collect();
    let bfi_spatial_r = bfi_spatial_correlation(&bfi_sim, &bfi_ref).ok();
    let bfi_spatial_r_filtered = nse_filter.and_then(|threshold| {
        let sim: Vec<Option<f64>> = metrics
            .iter()
            .map(|m| (m.nse > threshold).then_some(m.bfi_sim).flatten())
            .collect();
        bfi_spatial_correlation(&sim, &bfi_ref).ok()
    });

    let et_corrs: Vec<f64> = metrics.iter().filter_map(|m| m.et_correlation).collect();
    let et_rmses: Vec<f64> = metrics.iter().filter_map(|m| m.et_rmse_mm_8day).collect();
    let mean_pairs: (Vec<f64>, Vec<f64>) = metrics
        .iter()
        .filter_map(|m| m.mean_et_mm_day.zip(m.mean_et_ref_mm_day))
        .unzip();
    let et_mean_spatial_r = if mean_pairs.0.len() >= 3 {
        super::metrics::pearson(&mean_pairs.0, &mean_pairs.1).ok()
    } else {
        None
    };

    Ok(Summary {
        n_basins: metrics.len(),
        median_nse: median(&nse_values),
        bfi_spatial_r,
        bfi_spatial_r_filtered,
        nse_filter,
        median_et_correlation: (!et_corrs.is_empty()).then(|| median(&et_corrs)),
        median_et_rmse_mm_8day: (!et_rmses.is_empty()).then(|| median(&et_rmses)),
        et_mean_spatial_r,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> EvalError + '_ {
    move |e| EvalError::Io {
        path: path.display().to_string(),
        source: e,
    }
}

pub fn write_per_basin_csv(path: &Path, metrics: &[BasinMetrics]) -> Result<(), EvalError> {
    let mut f = std::fs::File::create(path).map_err(io_err(path))?;
    writeln!(
        f,
        "basin_id,nse,rmse,flow_correlation,bfi_sim,bfi_ref,et_correlation,et_rmse_mm_8day,mean_et_mm_day,mean_et_ref_mm_day"
    )
    .map_err(io_err(path))?;
    for m in metrics {
        writeln!(
            f,
            "{},{},{},{},{},{},{},{},{},{}",
            m.basin_id,
            m.nse,
            m.rmse,
            m.flow_correlation,
            opt(m.bfi_sim),
            opt(m.bfi_ref),
            opt(m.et_correlation),
            opt(m.et_rmse_mm_8day),
            opt(m.mean_et_mm_day),
            opt(m.mean_et_ref_mm_day),
        )
        .map_err(io_err(path))?;
    }
    Ok(())
}

pub fn write_summary_json(path: &Path, summary: &Summary) -> Result<(), EvalError> {
    let text = serde_json::to_string_pretty(summary).expect("summary serializes");
    std::fs::write(path, text).map_err(io_err(path))
}

/// Plot-ready empirical CDF of per-basin NSE: `fraction,nse` rows with the
/// NSE values sorted ascending.
pub fn write_nse_cdf_csv(path: &Path, metrics: &[BasinMetrics]) -> Result<(), EvalError> {
    let mut values: Vec<f64> = metrics.iter().map(|m| m.nse).collect();
    values.sort_by(f64::total_cmp);
    let mut f = std::fs::File::create(path).map_err(io_err(path))?;
    writeln!(f, "fraction,nse").map_err(io_err(path))?;
    let n = values.len();
    for (i, v) in values.iter().enumerate() {
        writeln!(f, "{},{}", (i + 1) as f64 / n as f64, v).map_err(io_err(path))?;
    }
    Ok(())
}
