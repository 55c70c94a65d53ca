//! Time-discrete HBV water balance with learnable variants.
//!
//! Five stores (snowpack, liquid snow, surface soil, upper and lower
//! subsurface zones) are updated once per day from precipitation,
//! temperature, and potential ET. Every withdrawal is min-capped by its
//! store with the tape's differentiable `min`, so mass stays non-negative
//! and the whole step is differentiable.
//!
//! Intra-step ordering: snow processes run first; the soil receives rain
//! plus snowmelt infiltration and computes effective rainfall, then excess,
//! then actual ET, each drawing from the running store; the upper zone adds
//! effective rainfall and excess, percolates, then releases fast flow and
//! stormflow from what remains; the lower zone adds percolation and
//! releases baseflow.

mod ranges;
mod simulate;
mod step;

pub use ranges::{params_ordered, ParamRange, ParamRanges, PARAM_COUNT};
pub use simulate::{
    hbv_rollout, hbv_simulate, DayInput, FluxSeries, ForcingView, Rollout, SimulationOutput,
    StateSeries,
};
pub use step::{
    hbv_step, lower_zone_step, partition_precip, snow_step, soil_step, upper_zone_step,
    LowerZoneOut, SnowStepOut, SoilStepOut, StepConfig, UpperZoneOut,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::autodiff::{Mat, Tape, Var};

/// The five water stores, in millimetres.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HbvState {
    pub snowpack: f64,
    pub snow_liquid: f64,
    pub soil_moisture: f64,
    pub upper_zone: f64,
    pub lower_zone: f64,
}

impl HbvState {
    pub fn zero() -> HbvState {
        HbvState {
            snowpack: 0.0,
            snow_liquid: 0.0,
            soil_moisture: 0.0,
            upper_zone: 0.0,
            lower_zone: 0.0,
        }
    }

    /// Warm-start state: half-full soil column and a mildly wet lower zone
    /// shorten the spin-up transient.
    pub fn initial(params: &StaticParams) -> HbvState {
        HbvState {
            snowpack: 0.0,
            snow_liquid: 0.0,
            soil_moisture: 0.5 * params.field_capacity,
            upper_zone: 0.0,
            lower_zone: 10.0,
        }
    }

    pub fn total(&self) -> f64 {
        self.snowpack + self.snow_liquid + self.soil_moisture + self.upper_zone + self.lower_zone
    }
}

/// Physical model parameters for one basin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StaticParams {
    /// Snow/rain partition temperature (deg C).
    pub threshold_temp: f64,
    /// Degree-day melt factor (mm / deg C / day).
    pub degree_day_factor: f64,
    /// Refreeze coefficient (-).
    pub refreeze_factor: f64,
    /// Liquid-holding capacity of the snowpack, as a fraction (-).
    pub holding_capacity: f64,
    /// Field capacity of the soil store (mm).
    pub field_capacity: f64,
    /// Soil-moisture fraction at which ET reaches its potential (-).
    pub et_depletion: f64,
    /// Runoff-curve shape exponent (-).
    pub runoff_shape: f64,
    /// ET-efficiency shape exponent (-); ignored by the original variant.
    pub et_shape: f64,
    /// Maximum percolation into the lower zone (mm/day).
    pub max_percolation: f64,
    /// Fast-flow coefficient (1/day).
    pub fast_flow_coeff: f64,
    /// Upper-zone threshold above which fast flow activates (mm).
    pub fast_flow_threshold: f64,
    /// Stormflow coefficient (1/day).
    pub stormflow_coeff: f64,
    /// Baseflow recession coefficient (1/day).
    pub baseflow_coeff: f64,
    /// Routing kernel shape (-).
    pub routing_shape: f64,
    /// Routing kernel scale (days).
    pub routing_scale: f64,
}

/// Optional per-day parameter series; lengths must equal the simulation
/// length.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DynamicParams {
    pub runoff_shape: Option<Vec<f64>>,
    pub et_shape: Option<Vec<f64>>,
}

/// One day of internal fluxes, in mm/day.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fluxes {
    pub precip_snow: f64,
    pub precip_rain: f64,
    pub snowmelt: f64,
    pub refreeze: f64,
    pub snow_infiltration: f64,
    pub effective_rainfall: f64,
    pub excess: f64,
    pub actual_et: f64,
    pub percolation: f64,
    pub fast_flow: f64,
    pub stormflow: f64,
    pub baseflow: f64,
    pub discharge: f64,
}

/// Which model structure to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelVariant {
    /// Unmodified equations: linear ET efficiency, curve-based effective
    /// rainfall, static parameters.
    OriginalHbv,
    /// ET-efficiency exponent added, static parameters.
    Delta,
    /// Exponent variant with a per-day runoff-shape parameter.
    DeltaBeta,
    /// Exponent variant with a per-day ET-shape parameter.
    DeltaGamma,
    /// Exponent variant with both per-day parameters.
    DeltaGammaBeta,
    /// Exponent variant with the effective-rainfall relation replaced by a
    /// gate network.
    DeltaNnr,
}

impl ModelVariant {
    pub const ALL: [ModelVariant; 6] = [
        ModelVariant::OriginalHbv,
        ModelVariant::Delta,
        ModelVariant::DeltaBeta,
        ModelVariant::DeltaGamma,
        ModelVariant::DeltaGammaBeta,
        ModelVariant::DeltaNnr,
    ];

    /// Does the ET efficiency use the shape exponent?
    pub fn uses_et_exponent(&self) -> bool {
        !matches!(self, ModelVariant::OriginalHbv)
    }

    pub fn dynamic_runoff_shape(&self) -> bool {
        matches!(self, ModelVariant::DeltaBeta | ModelVariant::DeltaGammaBeta)
    }

    pub fn dynamic_et_shape(&self) -> bool {
        matches!(self, ModelVariant::DeltaGamma | ModelVariant::DeltaGammaBeta)
    }

    pub fn dynamic_count(&self) -> usize {
        self.dynamic_runoff_shape() as usize + self.dynamic_et_shape() as usize
    }

    pub fn uses_nnr(&self) -> bool {
        matches!(self, ModelVariant::DeltaNnr)
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelVariant::OriginalHbv => "original_hbv",
            ModelVariant::Delta => "delta",
            ModelVariant::DeltaBeta => "delta_beta",
            ModelVariant::DeltaGamma => "delta_gamma",
            ModelVariant::DeltaGammaBeta => "delta_gamma_beta",
            ModelVariant::DeltaNnr => "delta_nnr",
        }
    }
}

impl std::str::FromStr for ModelVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelVariant::ALL
            .iter()
            .find(|v| v.name() == s)
            .copied()
            .ok_or_else(|| format!("unknown model variant '{s}'"))
    }
}

#[derive(Debug, Error)]
pub enum HbvError {
    #[error("non-finite value after the {sub_step} step on day {day}")]
    NonFinite { sub_step: &'static str, day: usize },
    #[error("dynamic parameter series has {got} entries, expected {expected}")]
    DynamicLength { expected: usize, got: usize },
    #[error("simulation needs more than {warmup} warm-up days but forcing has {got}")]
    TooShort { warmup: usize, got: usize },
    #[error("forcing series lengths differ: precip {precip}, temp {temp}, pet {pet}")]
    ForcingLength {
        precip: usize,
        temp: usize,
        pet: usize,
    },
    #[error("effective-rainfall network required by variant {variant} but not supplied")]
    MissingNnr { variant: &'static str },
}

/// Per-basin parameter columns registered on a tape, each `[B x 1]`.
#[derive(Clone, Copy, Debug)]
pub struct ParamVars {
    pub threshold_temp: Var,
    pub degree_day_factor: Var,
    pub refreeze_factor: Var,
    pub holding_capacity: Var,
    pub field_capacity: Var,
    pub et_depletion: Var,
    pub runoff_shape: Var,
    pub et_shape: Var,
    pub max_percolation: Var,
    pub fast_flow_coeff: Var,
    pub fast_flow_threshold: Var,
    pub stormflow_coeff: Var,
    pub baseflow_coeff: Var,
    pub routing_shape: Var,
    pub routing_scale: Var,
}

impl ParamVars {
    /// Register a batch of basin parameters as non-differentiated columns.
    pub fn constants(tape: &Tape, params: &[StaticParams]) -> ParamVars {
        let col = |f: fn(&StaticParams) -> f64| {
            tape.matrix(Mat::column(
                &params.iter().map(f).collect::<Vec<f64>>(),
            ))
        };
        ParamVars {
            threshold_temp: col(|p| p.threshold_temp),
            degree_day_factor: col(|p| p.degree_day_factor),
            refreeze_factor: col(|p| p.refreeze_factor),
            holding_capacity: col(|p| p.holding_capacity),
            field_capacity: col(|p| p.field_capacity),
            et_depletion: col(|p| p.et_depletion),
            runoff_shape: col(|p| p.runoff_shape),
            et_shape: col(|p| p.et_shape),
            max_percolation: col(|p| p.max_percolation),
            fast_flow_coeff: col(|p| p.fast_flow_coeff),
            fast_flow_threshold: col(|p| p.fast_flow_threshold),
            stormflow_coeff: col(|p| p.stormflow_coeff),
            baseflow_coeff: col(|p| p.baseflow_coeff),
            routing_shape: col(|p| p.routing_shape),
            routing_scale: col(|p| p.routing_scale),
        }
    }
}

/// Batched state columns on a tape, each `[B x 1]`.
#[derive(Clone, Copy, Debug)]
pub struct StateVars {
    pub snowpack: Var,
    pub snow_liquid: Var,
    pub soil_moisture: Var,
    pub upper_zone: Var,
    pub lower_zone: Var,
}

impl StateVars {
    pub fn constants(tape: &Tape, states: &[HbvState]) -> StateVars {
        let col = |f: fn(&HbvState) -> f64| {
            tape.matrix(Mat::column(&states.iter().map(f).collect::<Vec<f64>>()))
        };
        StateVars {
            snowpack: col(|s| s.snowpack),
            snow_liquid: col(|s| s.snow_liquid),
            soil_moisture: col(|s| s.soil_moisture),
            upper_zone: col(|s| s.upper_zone),
            lower_zone: col(|s| s.lower_zone),
        }
    }

    pub fn values(&self, tape: &Tape) -> Vec<HbvState> {
        let snowpack = tape.matrix_value(self.snowpack);
        let snow_liquid = tape.matrix_value(self.snow_liquid);
        let soil = tape.matrix_value(self.soil_moisture);
        let upper = tape.matrix_value(self.upper_zone);
        let lower = tape.matrix_value(self.lower_zone);
        (0..snowpack.rows())
            .map(|b| HbvState {
                snowpack: snowpack.get(b, 0),
                snow_liquid: snow_liquid.get(b, 0),
                soil_moisture: soil.get(b, 0),
                upper_zone: upper.get(b, 0),
                lower_zone: lower.get(b, 0),
            })
            .collect()
    }
}

/// Batched flux columns for one day, each `[B x 1]`.
#[derive(Clone, Copy, Debug)]
pub struct FluxVars {
    pub precip_snow: Var,
    pub precip_rain: Var,
    pub snowmelt: Var,
    pub refreeze: Var,
    pub snow_infiltration: Var,
    pub effective_rainfall: Var,
    pub excess: Var,
    pub actual_et: Var,
    pub percolation: Var,
    pub fast_flow: Var,
    pub stormflow: Var,
    pub baseflow: Var,
    pub discharge: Var,
}

impl FluxVars {
    pub fn values(&self, tape: &Tape) -> Vec<Fluxes> {
        let read = |v: Var| tape.matrix_value(v);
        let ps = read(self.precip_snow);
        let pr = read(self.precip_rain);
        let melt = read(self.snowmelt);
        let rfz = read(self.refreeze);
        let inf = read(self.snow_infiltration);
        let peff = read(self.effective_rainfall);
        let ex = read(self.excess);
        let et = read(self.actual_et);
        let perc = read(self.percolation);
        let q0 = read(self.fast_flow);
        let q1 = read(self.stormflow);
        let q2 = read(self.baseflow);
        let q = read(self.discharge);
        (0..ps.rows())
            .map(|b| Fluxes {
                precip_snow: ps.get(b, 0),
                precip_rain: pr.get(b, 0),
                snowmelt: melt.get(b, 0),
                refreeze: rfz.get(b, 0),
                snow_infiltration: inf.get(b, 0),
                effective_rainfall: peff.get(b, 0),
                excess: ex.get(b, 0),
                actual_et: et.get(b, 0),
                percolation: perc.get(b, 0),
                fast_flow: q0.get(b, 0),
                stormflow: q1.get(b, 0),
                baseflow: q2.get(b, 0),
                discharge: q.get(b, 0),
            })
            .collect()
    }
}
