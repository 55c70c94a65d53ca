//! Calendar 8-day compositing of daily series, restarting every January 1,
//! and metrics against a reference composite product.

use std::collections::BTreeMap;

use chrono::{Datelike, Days, NaiveDate};
use serde::{Deserialize, Serialize};

use super::metrics::pearson;

/// One composite period: the period start date, how many days it spans
/// (8, except 5 or 6 at year end), and the mean daily value over it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtComposite {
    pub period_start: NaiveDate,
    pub days: u32,
    pub mean_daily: f64,
}

fn period_start_for(date: NaiveDate) -> NaiveDate {
    let idx = (date.ordinal() - 1) / 8;
    NaiveDate::from_yo_opt(date.year(), idx * 8 + 1).expect("period start exists")
}

fn period_len(start: NaiveDate) -> u32 {
    let year_days = if start.leap_year() { 366 } else { 365 };
    8.min(year_days - start.ordinal() + 1)
}

/// Composite a contiguous daily series into calendar 8-day periods. Only
/// periods fully covered by the record are emitted, so every composite is a
/// complete-period mean.
pub fn et_8day_composite(daily: &[f64], start: NaiveDate) -> Vec<EtComposite> {
    let mut out = Vec::new();
    let end = start + Days::new(daily.len() as u64); // one past the last day
    // Skip a partially covered first period. Successive period starts are
    // just `start + len`: year-end periods are capped so the next start is
    // January 1 and the calendar restarts by construction.
    let mut cursor = {
        let first = period_start_for(start);
        if first == start {
            first
        } else {
            first + Days::new(period_len(first) as u64)
        }
    };
    while cursor < end {
        let days = period_len(cursor);
        let last = cursor + Days::new((days - 1) as u64);
        if last >= end {
            break;
        }
        let offset = (cursor - start).num_days() as usize;
        let slice = &daily[offset..offset + days as usize];
        out.push(EtComposite {
            period_start: cursor,
            days,
            mean_daily: slice.iter().sum::<f64>() / days as f64,
        });
        cursor = cursor + Days::new(days as u64);
    }
    out
}

/// Per-basin comparison of simulated and reference composites matched by
/// period start.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtBasinMetrics {
    /// Temporal Pearson correlation over all matched periods.
    pub correlation: f64,
    /// RMSE in mm per 8-day period over matched full-length periods.
    pub rmse_mm_8day: f64,
    pub matched_periods: usize,
}

/// Compare composites; returns `None` when fewer than 3 periods overlap
/// (the basin is then skipped by the caller).
pub fn et_metrics(sim: &[EtComposite], reference: &[EtComposite]) -> Option<EtBasinMetrics> {
    let by_start: BTreeMap<NaiveDate, &EtComposite> =
        reference.iter().map(|c| (c.period_start, c)).collect();
    let mut sim_vals = Vec::new();
    let mut ref_vals = Vec::new();
    let mut sim_full = Vec::new();
    let mut ref_full = Vec::new();
    for s in sim {
        if let Some(r) = by_start.get(&s.period_start) {
            sim_vals.push(s.mean_daily);
            ref_vals.push(r.mean_daily);
            if s.days == 8 && r.days == 8 {
                sim_full.push(s.mean_daily * 8.0);
                ref_full.push(r.mean_daily * 8.0);
            }
        }
    }
    if sim_vals.len() < 3 {
        return None;
    }
    let correlation = pearson(&sim_vals, &ref_vals).ok()?;
    let rmse = if sim_full.is_empty() {
        f64::NAN
    } else {
        let sq: f64 = sim_full
            .iter()
            .zip(&ref_full)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        (sq / sim_full.len() as f64).sqrt()
    };
    Some(EtBasinMetrics {
        correlation,
        rmse_mm_8day: rmse,
        matched_periods: sim_vals.len(),
    })
}

/// Result of [`et_metrics`] plus the long-term means used for the spatial
/// correlation of mean ET across basins.
pub fn long_term_mean(composites: &[EtComposite]) -> Option<f64> {
    if composites.is_empty() {
        return None;
    }
    let total_days: u32 = composites.iter().map(|c| c.days).sum();
    let total: f64 = composites.iter().map(|c| c.mean_daily * c.days as f64).sum();
    Some(total / total_days as f64)
}
