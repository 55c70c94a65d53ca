//! Multi-day rollouts: a tape-level batched rollout for training, and a
//! plain single-basin simulation that returns full state and flux series
//! plus routed discharge.

use crate::autodiff::{Mat, Tape, Var};
use crate::neural::NnrNet;
use crate::routing::{gamma_uh, route, DEFAULT_UH_DAYS};

use super::{
    hbv_step, DynamicParams, Fluxes, HbvError, HbvState, ModelVariant, ParamVars, StateVars,
    StaticParams, StepConfig,
};

/// One day of inputs for the batched rollout; all `[B x 1]` columns, with
/// optional per-day parameter overrides already mapped to physical units.
#[derive(Clone, Copy, Debug)]
pub struct DayInput {
    pub precip: Var,
    pub temp: Var,
    pub pet: Var,
    pub runoff_shape: Option<Var>,
    pub et_shape: Option<Var>,
}

/// Tape-level rollout output: per-day states and fluxes as live variables.
pub struct Rollout {
    pub states: Vec<StateVars>,
    pub fluxes: Vec<super::FluxVars>,
    pub final_state: StateVars,
}

/// Advance the batched model over `days`, recording every step on the tape.
pub fn hbv_rollout(
    tape: &Tape,
    days: &[DayInput],
    init: StateVars,
    params: &ParamVars,
    cfg: &StepConfig,
) -> Result<Rollout, HbvError> {
    let mut state = init;
    let mut states = Vec::with_capacity(days.len());
    let mut fluxes = Vec::with_capacity(days.len());
    for (day, input) in days.iter().enumerate() {
        let (next, flux) = hbv_step(
            tape,
            &state,
            input.precip,
            input.temp,
            input.pet,
            params,
            input.runoff_shape,
            input.et_shape,
            cfg,
            day,
        )?;
        state = next;
        states.push(state);
        fluxes.push(flux);
    }
    Ok(Rollout {
        states,
        fluxes,
        final_state: state,
    })
}

/// Borrowed daily forcing columns for one basin.
#[derive(Clone, Copy, Debug)]
pub struct ForcingView<'a> {
    pub precip: &'a [f64],
    pub temp: &'a [f64],
    pub pet: &'a [f64],
}

impl<'a> ForcingView<'a> {
    pub fn len(&self) -> usize {
        self.precip.len()
    }

    pub fn is_empty(&self) -> bool {
        self.precip.is_empty()
    }

    fn validate(&self) -> Result<(), HbvError> {
        if self.precip.len() != self.temp.len() || self.precip.len() != self.pet.len() {
            return Err(HbvError::ForcingLength {
                precip: self.precip.len(),
                temp: self.temp.len(),
                pet: self.pet.len(),
            });
        }
        Ok(())
    }
}

/// Daily state trajectories, in mm.
#[derive(Clone, Debug, Default)]
pub struct StateSeries {
    pub snowpack: Vec<f64>,
    pub snow_liquid: Vec<f64>,
    pub soil_moisture: Vec<f64>,
    pub upper_zone: Vec<f64>,
    pub lower_zone: Vec<f64>,
}

/// Daily flux series, in mm/day, plus routed discharge.
#[derive(Clone, Debug, Default)]
pub struct FluxSeries {
    pub precip_snow: Vec<f64>,
    pub precip_rain: Vec<f64>,
    pub snowmelt: Vec<f64>,
    pub refreeze: Vec<f64>,
    pub snow_infiltration: Vec<f64>,
    pub effective_rainfall: Vec<f64>,
    pub excess: Vec<f64>,
    pub actual_et: Vec<f64>,
    pub percolation: Vec<f64>,
    pub fast_flow: Vec<f64>,
    pub stormflow: Vec<f64>,
    pub baseflow: Vec<f64>,
    pub discharge: Vec<f64>,
    /// Discharge convolved with the gamma unit hydrograph.
    pub routed_discharge: Vec<f64>,
}

impl FluxSeries {
    fn push(&mut self, f: &Fluxes) {
        self.precip_snow.push(f.precip_snow);
        self.precip_rain.push(f.precip_rain);
        self.snowmelt.push(f.snowmelt);
        self.refreeze.push(f.refreeze);
        self.snow_infiltration.push(f.snow_infiltration);
        self.effective_rainfall.push(f.effective_rainfall);
        self.excess.push(f.excess);
        self.actual_et.push(f.actual_et);
        self.percolation.push(f.percolation);
        self.fast_flow.push(f.fast_flow);
        self.stormflow.push(f.stormflow);
        self.baseflow.push(f.baseflow);
        self.discharge.push(f.discharge);
    }
}

/// Full simulation output over the whole forcing record (warm-up included;
/// `warmup_days` marks how many leading days downstream consumers should
/// exclude from losses and metrics).
#[derive(Clone, Debug)]
pub struct SimulationOutput {
    pub states: StateSeries,
    pub fluxes: FluxSeries,
    pub warmup_days: usize,
}

/// Simulate one basin over its whole forcing record and route the
/// discharge. States start from [`HbvState::initial`].
pub fn hbv_simulate(
    forcing: ForcingView,
    params: &StaticParams,
    dynamics: Option<&DynamicParams>,
    variant: ModelVariant,
    nnr: Option<&NnrNet>,
    warmup_days: usize,
) -> Result<SimulationOutput, HbvError> {
    forcing.validate()?;
    let n = forcing.len();
    if n <= warmup_days {
        return Err(HbvError::TooShort {
            warmup: warmup_days,
            got: n,
        });
    }
    if let Some(dynamics) = dynamics {
        for series in [&dynamics.runoff_shape, &dynamics.et_shape]
            .into_iter()
            .flatten()
        {
            if series.len() != n {
                return Err(HbvError::DynamicLength {
                    expected: n,
                    got: series.len(),
                });
            }
        }
    }

    let tape = Tape::new();
    let param_vars = ParamVars::constants(&tape, std::slice::from_ref(params));
    let nnr_vars = nnr.map(|net| net.leaf(&tape, false));
    let cfg = StepConfig::new(variant, nnr_vars.as_ref())?;
    let init = StateVars::constants(&tape, &[HbvState::initial(params)]);

    let col = |v: f64| tape.matrix(Mat::column(&[v]));
    let days: Vec<DayInput> = (0..n)
        .map(|d| DayInput {
            precip: col(forcing.precip[d]),
            temp: col(forcing.temp[d]),
            pet: col(forcing.pet[d]),
            runoff_shape: dynamics
                .and_then(|dy| dy.runoff_shape.as_ref())
                .map(|s| col(s[d])),
            et_shape: dynamics
                .and_then(|dy| dy.et_shape.as_ref())
                .map(|s| col(s[d])),
        })
        .collect();

    let rollout = hbv_rollout(&tape, &days, init, &param_vars, &cfg)?;

    let mut states = StateSeries::default();
    let mut fluxes = FluxSeries::default();
    for (state, flux) in rollout.states.iter().zip(&rollout.fluxes) {
        let s = state.values(&tape)[0];
        states.snowpack.push(s.snowpack);
        states.snow_liquid.push(s.snow_liquid);
        states.soil_moisture.push(s.soil_moisture);
        states.upper_zone.push(s.upper_zone);
        states.lower_zone.push(s.lower_zone);
        fluxes.push(&flux.values(&tape)[0]);
    }
    let uh = gamma_uh(params.routing_shape, params.routing_scale, DEFAULT_UH_DAYS);
    fluxes.routed_discharge = route(&fluxes.discharge, &uh);

    Ok(SimulationOutput {
        states,
        fluxes,
        warmup_days,
    })
}
