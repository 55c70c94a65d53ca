//! Model evaluation: efficiency and correlation metrics, the baseflow
//! index, 8-day ET composites, and report writers.

mod composite;
mod metrics;
mod pipeline;
mod report;

pub use composite::{et_8day_composite, et_metrics, long_term_mean, EtBasinMetrics, EtComposite};
pub use metrics::{bfi_sim, bfi_spatial_correlation, flow_correlation, nse, pearson, rmse};
pub use pipeline::{
    composite_series, evaluate_basin, evaluate_simulations, read_bfi_reference, read_et_reference,
    write_bfi_reference, write_et_reference, EvaluationReport, References,
};
pub use report::{
    median, summarize, write_nse_cdf_csv, write_per_basin_csv, write_summary_json, BasinMetrics,
    Summary,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("need at least {needed} valid observations, found {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("observed series has zero variance")]
    ZeroVariance,
    #[error("total discharge is zero over the evaluation period")]
    ZeroDischarge,
    #[error("need at least {needed} basins with values, found {got}")]
    TooFewBasins { needed: usize, got: usize },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}
