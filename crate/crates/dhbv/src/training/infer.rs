//! Inference with a trained checkpoint: run the parameterization network
//! over a simulation period (values only, bounded memory), materialize the
//! physical parameters, and simulate each requested basin with warm-up.

use chrono::NaiveDate;

use crate::autodiff::Mat;
use crate::data::{flow_transform_inv, Dataset};
use crate::hbv::{
    hbv_simulate, DynamicParams, ForcingView, SimulationOutput, StaticParams, PARAM_COUNT,
};
use crate::neural::{lstm_streamflow_forward_values, param_net_forward_values};

use super::trainer::{normalized_attributes, ModelState};
use super::{Checkpoint, TrainError};

/// Days per no-gradient segment; bounds peak memory on long records.
const SEGMENT_DAYS: usize = 64;

pub enum PredictionFlow {
    /// Full process-model output, warm-up rows included.
    Simulated(Box<SimulationOutput>),
    /// Discharge-only series from the data-driven baseline, warm-up rows
    /// included.
    FlowOnly(Vec<f64>),
}

pub struct Prediction {
    pub basin: usize,
    /// Axis index of the first simulated day (the start of the warm-up).
    pub sim_offset: usize,
    pub warmup_days: usize,
    pub flow: PredictionFlow,
}

/// Simulate `basins` over `[start, end]`, warming up over the checkpoint's
/// configured warm-up length immediately before `start`.
pub fn predict(
    dataset: &Dataset,
    ckpt: &Checkpoint,
    basins: &[usize],
    start: NaiveDate,
    end: NaiveDate,
) -> Result<Vec<Prediction>, TrainError> {
    let cfg = &ckpt.config;
    let start_idx = dataset
        .index_of(start)
        .ok_or_else(|| TrainError::Inference(format!("start date {start} outside the dataset")))?;
    let end_idx = dataset
        .index_of(end)
        .ok_or_else(|| TrainError::Inference(format!("end date {end} outside the dataset")))?;
    if end_idx < start_idx {
        return Err(TrainError::Inference("period is reversed".into()));
    }
    let warmup = cfg.warmup_days;
    let sim_start = start_idx.checked_sub(warmup).ok_or_else(|| {
        TrainError::Inference(format!(
            "warm-up needs {warmup} days before {start} but the record starts at {}",
            dataset.start()
        ))
    })?;
    for &b in basins {
        if b >= dataset.n_basins() {
            return Err(TrainError::Inference(format!("basin index {b} out of range")));
        }
    }

    let model = ModelState::from_checkpoint(cfg, ckpt)?;
    let norm = &ckpt.norm;
    let attrs = normalized_attributes(dataset, norm, basins);
    let n_days = end_idx - sim_start + 1;
    let day_inputs = |with_attrs: bool| -> Vec<Mat> {
        (0..n_days)
            .map(|d| {
                let axis = sim_start + d;
                Mat::from_fn(
                    basins.len(),
                    if with_attrs { 3 + attrs.cols() } else { 3 },
                    |r, c| {
                        let forcing = &dataset.forcings[basins[r]];
                        match c {
                            0 => norm.forcing.normalize(0, forcing.precip[axis]),
                            1 => norm.forcing.normalize(1, forcing.t_mean[axis]),
                            2 => norm.forcing.normalize(2, forcing.pet[axis]),
                            _ => attrs.get(r, c - 3),
                        }
                    },
                )
            })
            .collect()
    };

    match model {
        ModelState::Hbv { param_net, nnr } => {
            let forcings = day_inputs(false);
            let values =
                param_net_forward_values(&param_net, &attrs, &forcings, None, SEGMENT_DAYS);
            let ranges = cfg.param_ranges;
            let mut out = Vec::with_capacity(basins.len());
            for (row, &basin) in basins.iter().enumerate() {
                let unit: Vec<f64> = (0..PARAM_COUNT)
                    .map(|c| values.static_unit.get(row, c))
                    .collect();
                let params: StaticParams = ranges.params_from_unit(&unit);
                let dynamics = dynamic_series(cfg, &values.dynamic_unit, row, &ranges);
                let forcing = &dataset.forcings[basin];
                let sim = hbv_simulate(
                    ForcingView {
                        precip: &forcing.precip[sim_start..=end_idx],
                        temp: &forcing.t_mean[sim_start..=end_idx],
                        pet: &forcing.pet[sim_start..=end_idx],
                    },
                    &params,
                    dynamics.as_ref(),
                    cfg.variant,
                    nnr.as_ref(),
                    warmup,
                )?;
                out.push(Prediction {
                    basin,
                    sim_offset: sim_start,
                    warmup_days: warmup,
                    flow: PredictionFlow::Simulated(Box::new(sim)),
                });
            }
            Ok(out)
        }
        ModelState::Lstm { net } => {
            let flow_norm = ckpt.norm.flow.as_ref().ok_or_else(|| {
                TrainError::Inference("checkpoint lacks flow statistics for the baseline".into())
            })?;
            let inputs = day_inputs(true);
            let (predictions, _) =
                lstm_streamflow_forward_values(&net, &inputs, None, SEGMENT_DAYS);
            let mut out = Vec::with_capacity(basins.len());
            for (row, &basin) in basins.iter().enumerate() {
                let flow: Vec<f64> = predictions
                    .iter()
                    .map(|day| flow_transform_inv(flow_norm.denormalize(0, day.get(row, 0))))
                    .collect();
                out.push(Prediction {
                    basin,
                    sim_offset: sim_start,
                    warmup_days: warmup,
                    flow: PredictionFlow::FlowOnly(flow),
                });
            }
            Ok(out)
        }
    }
}

fn dynamic_series(
    cfg: &super::TrainingConfig,
    dynamic_unit: &[Mat],
    row: usize,
    ranges: &crate::hbv::ParamRanges,
) -> Option<DynamicParams> {
    if cfg.variant.dynamic_count() == 0 {
        return None;
    }
    let mut col = 0;
    let runoff = cfg.variant.dynamic_runoff_shape().then(|| {
        let series: Vec<f64> = dynamic_unit
            .iter()
            .map(|m| ranges.runoff_shape.map01(m.get(row, col)))
            .collect();
        col += 1;
        series
    });
    let et = cfg.variant.dynamic_et_shape().then(|| {
        dynamic_unit
            .iter()
            .map(|m| ranges.et_shape.map01(m.get(row, col)))
            .collect::<Vec<f64>>()
    });
    Some(DynamicParams {
        runoff_shape: runoff,
        et_shape: et,
    })
}
