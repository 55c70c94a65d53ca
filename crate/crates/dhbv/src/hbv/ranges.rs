//! Physical parameter ranges. Network outputs in (0, 1) are mapped
//! affinely onto these bounds; the defaults are conventional calibration
//! ranges for daily basin-scale application and every bound is
//! configuration-overridable.

use serde::{Deserialize, Serialize};

use crate::autodiff::{Tape, Var};

use super::{ParamVars, StaticParams};

pub const PARAM_COUNT: usize = 15;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamRange {
    pub lo: f64,
    pub hi: f64,
}

impl ParamRange {
    pub fn new(lo: f64, hi: f64) -> ParamRange {
        assert!(hi >= lo, "parameter range upside down: [{lo}, {hi}]");
        ParamRange { lo, hi }
    }

    /// Map a unit-interval value onto the range.
    pub fn map01(&self, x: f64) -> f64 {
        self.lo + x * (self.hi - self.lo)
    }

    pub fn map_var(&self, tape: &Tape, x: Var) -> Var {
        tape.axpb(x, self.hi - self.lo, self.lo)
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ParamRanges {
    pub threshold_temp: ParamRange,
    pub degree_day_factor: ParamRange,
    pub refreeze_factor: ParamRange,
    pub holding_capacity: ParamRange,
    pub field_capacity: ParamRange,
    pub et_depletion: ParamRange,
    pub runoff_shape: ParamRange,
    pub et_shape: ParamRange,
    pub max_percolation: ParamRange,
    pub fast_flow_coeff: ParamRange,
    pub fast_flow_threshold: ParamRange,
    pub stormflow_coeff: ParamRange,
    pub baseflow_coeff: ParamRange,
    pub routing_shape: ParamRange,
    pub routing_scale: ParamRange,
}

impl Default for ParamRanges {
    fn default() -> Self {
        ParamRanges {
            threshold_temp: ParamRange::new(-2.5, 2.5),
            degree_day_factor: ParamRange::new(0.5, 10.0),
            refreeze_factor: ParamRange::new(0.0, 0.1),
            holding_capacity: ParamRange::new(0.0, 0.2),
            field_capacity: ParamRange::new(50.0, 1000.0),
            et_depletion: ParamRange::new(0.2, 1.0),
            runoff_shape: ParamRange::new(1.0, 6.0),
            et_shape: ParamRange::new(1.0, 5.0),
            max_percolation: ParamRange::new(0.0, 10.0),
            fast_flow_coeff: ParamRange::new(0.05, 0.9),
            fast_flow_threshold: ParamRange::new(0.0, 100.0),
            stormflow_coeff: ParamRange::new(0.01, 0.5),
            baseflow_coeff: ParamRange::new(0.001, 0.2),
            routing_shape: ParamRange::new(0.1, 2.9),
            routing_scale: ParamRange::new(0.1, 6.5),
        }
    }
}

impl ParamRanges {
    /// Fixed parameter order used everywhere a parameter vector is indexed:
    /// network head columns, checkpoints, and truth tables.
    pub fn ordered(&self) -> [ParamRange; PARAM_COUNT] {
        [
            self.threshold_temp,
            self.degree_day_factor,
            self.refreeze_factor,
            self.holding_capacity,
            self.field_capacity,
            self.et_depletion,
            self.runoff_shape,
            self.et_shape,
            self.max_percolation,
            self.fast_flow_coeff,
            self.fast_flow_threshold,
            self.stormflow_coeff,
            self.baseflow_coeff,
            self.routing_shape,
            self.routing_scale,
        ]
    }

    pub fn ordered_names() -> [&'static str; PARAM_COUNT] {
        [
            "threshold_temp",
            "degree_day_factor",
            "refreeze_factor",
            "holding_capacity",
            "field_capacity",
            "et_depletion",
            "runoff_shape",
            "et_shape",
            "max_percolation",
            "fast_flow_coeff",
            "fast_flow_threshold",
            "stormflow_coeff",
            "baseflow_coeff",
            "routing_shape",
            "routing_scale",
        ]
    }

    /// Build physical parameters from 15 unit-interval values in the fixed
    /// order.
    pub fn params_from_unit(&self, unit: &[f64]) -> StaticParams {
        assert_eq!(unit.len(), PARAM_COUNT, "expected {PARAM_COUNT} values");
        let r = self.ordered();
        StaticParams {
            threshold_temp: r[0].map01(unit[0]),
            degree_day_factor: r[1].map01(unit[1]),
            refreeze_factor: r[2].map01(unit[2]),
            holding_capacity: r[3].map01(unit[3]),
            field_capacity: r[4].map01(unit[4]),
            et_depletion: r[5].map01(unit[5]),
            runoff_shape: r[6].map01(unit[6]),
            et_shape: r[7].map01(unit[7]),
            max_percolation: r[8].map01(unit[8]),
            fast_flow_coeff: r[9].map01(unit[9]),
            fast_flow_threshold: r[10].map01(unit[10]),
            stormflow_coeff: r[11].map01(unit[11]),
            baseflow_coeff: r[12].map01(unit[12]),
            routing_shape: r[13].map01(unit[13]),
            routing_scale: r[14].map01(unit[14]),
        }
    }

    pub fn params_as_unit(&self, p: &StaticParams) -> [f64; PARAM_COUNT] {
        let r = self.ordered();
        let vals = params_ordered(p);
        let mut out = [0.0; PARAM_COUNT];
        for i in 0..PARAM_COUNT {
            out[i] = (vals[i] - r[i].lo) / (r[i].hi - r[i].lo).max(1e-12);
        }
        out
    }

    /// Map a `[B x PARAM_COUNT]` unit-interval matrix on the tape into
    /// per-parameter physical columns.
    pub fn map_static_outputs(&self, tape: &Tape, raw: Var) -> ParamVars {
        let r = self.ordered();
        let col = |i: usize| r[i].map_var(tape, tape.slice_cols(raw, i, 1));
        ParamVars {
            threshold_temp: col(0),
            degree_day_factor: col(1),
            refreeze_factor: col(2),
            holding_capacity: col(3),
            field_capacity: col(4),
            et_depletion: col(5),
            runoff_shape: col(6),
            et_shape: col(7),
            max_percolation: col(8),
            fast_flow_coeff: col(9),
            fast_flow_threshold: col(10),
            stormflow_coeff: col(11),
            baseflow_coeff: col(12),
            routing_shape: col(13),
            routing_scale: col(14),
        }
    }
}

/// Parameter values in the fixed order.
pub fn params_ordered(p: &StaticParams) -> [f64; PARAM_COUNT] {
    [
        p.threshold_temp,
        p.degree_day_factor,
        p.refreeze_factor,
        p.holding_capacity,
        p.field_capacity,
        p.et_depletion,
        p.runoff_shape,
        p.et_shape,
        p.max_percolation,
        p.fast_flow_coeff,
        p.fast_flow_threshold,
        p.stormflow_coeff,
        p.baseflow_coeff,
        p.routing_shape,
        p.routing_scale,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_roundtrip() {
        let ranges = ParamRanges::default();
        let unit: Vec<f64> = (0..PARAM_COUNT).map(|i| 0.1 + 0.05 * i as f64).collect();
        let params = ranges.params_from_unit(&unit);
        let back = ranges.params_as_unit(&params);
        for (a, b) in unit.iter().zip(back.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn map01_hits_bounds() {
        let r = ParamRange::new(-2.5, 2.5);
        assert_eq!(r.map01(0.0), -2.5);
        assert_eq!(r.map01(1.0), 2.5);
        assert_eq!(r.map01(0.5), 0.0);
    }
}
