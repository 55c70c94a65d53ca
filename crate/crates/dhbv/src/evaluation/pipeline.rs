//! Evaluation glue: align simulation tables with observations, compute the
//! per-basin metric rows, and aggregate the summary. Reference files are a
//! basin-level baseflow-index CSV (`basin_id,bfi`) and per-basin 8-day ET
//! composite CSVs (`period_start,et_mm_day`, mean daily ET per period).

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{Days, NaiveDate};

use crate::data::{Dataset, SimTable};

use super::composite::{et_8day_composite, et_metrics, long_term_mean, EtComposite};
use super::metrics::{bfi_sim, flow_correlation, nse, rmse};
use super::report::{summarize, BasinMetrics, Summary};
use super::EvalError;

#[derive(Clone, Debug, Default)]
pub struct References {
    /// Baseflow index per basin id.
    pub bfi: Option<BTreeMap<String, f64>>,
    /// ET composites per basin id.
    pub et: Option<BTreeMap<String, Vec<EtComposite>>>,
}

impl References {
    pub fn load(
        bfi_path: Option<&Path>,
        et_dir: Option<&Path>,
        basin_ids: &[String],
    ) -> Result<References, EvalError> {
        let bfi = bfi_path.map(read_bfi_reference).transpose()?;
        let et = et_dir
            .map(|dir| read_et_reference(dir, basin_ids))
            .transpose()?;
        Ok(References { bfi, et })
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> EvalError + '_ {
    move |e| EvalError::Io {
        path: path.display().to_string(),
        source: e,
    }
}

pub fn read_bfi_reference(path: &Path) -> Result<BTreeMap<String, f64>, EvalError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let id = parts.next().unwrap_or_default().trim().to_string();
        let value: f64 = parts
            .next()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(f64::NAN);
        if value.is_finite() {
            out.insert(id, value);
        }
    }
    Ok(out)
}

/// Write the baseflow-index reference schema.
pub fn write_bfi_reference(path: &Path, rows: &[(String, f64)]) -> Result<(), EvalError> {
    use std::io::Write;
    let mut f = std::fs::File::create(path).map_err(io_err(path))?;
    writeln!(f, "basin_id,bfi").map_err(io_err(path))?;
    for (id, v) in rows {
        writeln!(f, "{id},{v}").map_err(io_err(path))?;
    }
    Ok(())
}

pub fn read_et_reference(
    dir: &Path,
    basin_ids: &[String],
) -> Result<BTreeMap<String, Vec<EtComposite>>, EvalError> {
    let mut out = BTreeMap::new();
    for id in basin_ids {
        let path = dir.join(format!("{id}.csv"));
        if !path.exists() {
            continue;
        }
        let text = std::fs::read_to_string(&path).map_err(io_err(&path))?;
        let mut comps = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if i == 0 || line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let start = parts
                .next()
                .and_then(|s| NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d").ok());
            let value: Option<f64> = parts.next().and_then(|v| v.trim().parse().ok());
            if let (Some(period_start), Some(mean_daily)) = (start, value) {
                comps.push(EtComposite {
                    period_start,
                    days: composite_days(period_start),
                    mean_daily,
                });
            }
        }
        out.insert(id.clone(), comps);
    }
    Ok(out)
}

pub fn write_et_reference(path: &Path, comps: &[EtComposite]) -> Result<(), EvalError> {
    use std::io::Write;
    let mut f = std::fs::File::create(path).map_err(io_err(path))?;
    writeln!(f, "period_start,et_mm_day").map_err(io_err(path))?;
    for c in comps {
        writeln!(f, "{},{}", c.period_start, c.mean_daily).map_err(io_err(path))?;
    }
    Ok(())
}

fn composite_days(start: NaiveDate) -> u32 {
    use chrono::Datelike;
    let year_days = if start.leap_year() { 366 } else { 365 };
    8.min(year_days - start.ordinal() + 1)
}

/// Evaluate one basin's simulation table against the dataset observations
/// over the overlap of the table, the dataset axis, and `[start, end]`.
pub fn evaluate_basin(
    dataset: &Dataset,
    basin: usize,
    sim: &SimTable,
    refs: &References,
    start: Option<NaiveDate>,
    end: Option<NaiveDate>,
) -> Result<BasinMetrics, EvalError> {
    let id = dataset.basins[basin].id.clone();
    let obs = &dataset.observations[basin];

    // Overlap range on the simulation's index space.
    let mut lo = 0usize;
    let mut hi = sim.len(); // exclusive
    if let Some(s) = start {
        let offset = (s - sim.start).num_days();
        lo = lo.max(offset.max(0) as usize);
    }
    if let Some(e) = end {
        let offset = (e - sim.start).num_days() + 1;
        hi = hi.min(offset.max(0) as usize);
    }
    // Clip to the dataset axis.
    let ds_start = dataset.start();
    let ds_len = dataset.len() as i64;
    let head_gap = (ds_start - sim.start).num_days();
    if head_gap > 0 {
        lo = lo.max(head_gap as usize);
    }
    let tail = (sim.start - ds_start).num_days() + hi as i64;
    if tail > ds_len {
        hi = hi.saturating_sub((tail - ds_len) as usize);
    }
    if lo >= hi {
        return Err(EvalError::TooFewObservations { needed: 2, got: 0 });
    }

    let axis0 = (sim.date(lo) - ds_start).num_days() as usize;
    let n = hi - lo;
    let routed = &sim.routed_discharge[lo..hi];
    let obs_flow = &obs.flow[axis0..axis0 + n];
    let obs_mask = &obs.mask[axis0..axis0 + n];

    let nse_value = nse(routed, obs_flow, obs_mask)?;
    let rmse_value = rmse(routed, obs_flow, obs_mask)?;
    let corr = flow_correlation(routed, obs_flow, obs_mask)?;

    let bfi = if sim.baseflow.len() == sim.len() {
        bfi_sim(&sim.baseflow[lo..hi], &sim.discharge[lo..hi]).ok()
    } else {
        None
    };
    let bfi_ref = refs.bfi.as_ref().and_then(|m| m.get(&id)).copied();

    let (et_corr, et_rmse, mean_et, mean_et_ref) = if sim.actual_et.len() == sim.len() {
        let sim_comps = et_8day_composite(&sim.actual_et[lo..hi], sim.date(lo));
        let mean_et = long_term_mean(&sim_comps);
        match refs.et.as_ref().and_then(|m| m.get(&id)) {
            Some(ref_comps) => {
                let period_set: std::collections::BTreeSet<NaiveDate> =
                    sim_comps.iter().map(|c| c.period_start).collect();
                let matched_ref: Vec<EtComposite> = ref_comps
                    .iter()
                    .filter(|c| period_set.contains(&c.period_start))
                    .copied()
                    .collect();
                match et_metrics(&sim_comps, &matched_ref) {
                    Some(m) => (
                        Some(m.correlation),
                        Some(m.rmse_mm_8day),
                        mean_et,
                        long_term_mean(&matched_ref),
                    ),
                    None => (None, None, mean_et, None),
                }
            }
            None => (None, None, mean_et, None),
        }
    } else {
        (None, None, None, None)
    };

    Ok(BasinMetrics {
        basin_id: id,
        nse: nse_value,
        rmse: rmse_value,
        flow_correlation: corr,
        bfi_sim: bfi,
        bfi_ref,
        et_correlation: et_corr,
        et_rmse_mm_8day: et_rmse,
        mean_et_mm_day: mean_et,
        mean_et_ref_mm_day: mean_et_ref,
    })
}

/// Outcome of evaluating a set of simulations.
pub struct EvaluationReport {
    pub metrics: Vec<BasinMetrics>,
    pub summary: Summary,
    /// `(basin id, reason)` for basins whose evaluation failed, e.g. with
    /// no overlapping observations; they do not fail the run.
    pub skipped: Vec<(String, String)>,
}

/// Evaluate a set of simulations and aggregate.
pub fn evaluate_simulations(
    dataset: &Dataset,
    sims: &[(usize, SimTable)],
    refs: &References,
    start: Option<NaiveDate>,
    end: Option<NaiveDate>,
    nse_filter: Option<f64>,
) -> Result<EvaluationReport, EvalError> {
    let mut metrics = Vec::new();
    let mut skipped = Vec::new();
    for (basin, sim) in sims {
        match evaluate_basin(dataset, *basin, sim, refs, start, end) {
            Ok(m) => metrics.push(m),
            Err(e) => skipped.push((dataset.basins[*basin].id.clone(), e.to_string())),
        }
    }
    let summary = summarize(&metrics, nse_filter)?;
    Ok(EvaluationReport {
        metrics,
        summary,
        skipped,
    })
}

/// Convenience for a common need: composite a daily ET series over a date
/// range (used when exporting reference files from a truth simulation).
pub fn composite_series(daily: &[f64], start: NaiveDate, skip: usize) -> Vec<EtComposite> {
    et_8day_composite(&daily[skip..], start + Days::new(skip as u64))
}
