//! The daily sub-steps. All quantities are `[B x 1]` columns on the tape so
//! a batch of basins advances together; a single basin is just `B = 1`.

use crate::autodiff::{Tape, Var};
use crate::neural::{nnr_forward, NnrVars};

use super::{FluxVars, HbvError, ModelVariant, ParamVars, StateVars};

/// Per-day configuration for one step: the variant plus the gate network
/// when the variant replaces the effective-rainfall relation.
#[derive(Clone, Copy)]
pub struct StepConfig<'a> {
    pub variant: ModelVariant,
    pub nnr: Option<&'a NnrVars>,
}

impl<'a> StepConfig<'a> {
    pub fn new(variant: ModelVariant, nnr: Option<&'a NnrVars>) -> Result<Self, HbvError> {
        if variant.uses_nnr() && nnr.is_none() {
            return Err(HbvError::MissingNnr {
                variant: variant.name(),
            });
        }
        Ok(StepConfig { variant, nnr })
    }
}

/// Split precipitation into snowfall and rainfall at the threshold
/// temperature. The split is a hard switch, so no gradient flows through
/// the partition itself (the threshold still earns gradients through melt
/// and refreeze).
pub fn partition_precip(tape: &Tape, precip: Var, temp: Var, threshold_temp: Var) -> (Var, Var) {
    let is_snow = tape.indicator_lt(temp, threshold_temp);
    let snow = tape.mul(precip, is_snow);
    let rain = tape.sub(precip, snow);
    (snow, rain)
}

pub struct SnowStepOut {
    pub snowpack: Var,
    pub snow_liquid: Var,
    pub snowmelt: Var,
    pub refreeze: Var,
    pub infiltration: Var,
}

/// Snowpack update: degree-day melt capped by the pack, refreeze of liquid
/// capped by the liquid store, and release of liquid above the holding
/// capacity as infiltration.
pub fn snow_step(
    tape: &Tape,
    snowpack: Var,
    snow_liquid: Var,
    precip_snow: Var,
    temp: Var,
    params: &ParamVars,
) -> SnowStepOut {
    let melt_potential = tape.mul(
        params.degree_day_factor,
        tape.relu(tape.sub(temp, params.threshold_temp)),
    );
    let snowmelt = tape.min(melt_potential, snowpack);

    let refreeze_potential = tape.mul(
        tape.mul(params.degree_day_factor, params.refreeze_factor),
        tape.relu(tape.sub(params.threshold_temp, temp)),
    );
    let refreeze = tape.min(refreeze_potential, snow_liquid);

    let snowpack_next = tape.sub(tape.add(tape.add(snowpack, precip_snow), refreeze), snowmelt);
    let liquid_interim = tape.sub(tape.add(snow_liquid, snowmelt), refreeze);
    let holding = tape.mul(params.holding_capacity, snowpack_next);
    let infiltration = tape.relu(tape.sub(liquid_interim, holding));
    let snow_liquid_next = tape.sub(liquid_interim, infiltration);

    SnowStepOut {
        snowpack: snowpack_next,
        snow_liquid: snow_liquid_next,
        snowmelt,
        refreeze,
        infiltration,
    }
}

pub struct SoilStepOut {
    pub soil_moisture: Var,
    pub effective_rainfall: Var,
    pub excess: Var,
    pub actual_et: Var,
}

/// Soil store update. Effective rainfall is computed from the store at
/// entry (wetness curve or gate network), then excess above field capacity
/// drains, then ET draws from what remains.
#[allow(clippy::too_many_arguments)]
pub fn soil_step(
    tape: &Tape,
    soil_moisture: Var,
    infiltration: Var,
    precip_rain: Var,
    pet: Var,
    params: &ParamVars,
    runoff_shape: Var,
    et_shape: Var,
    cfg: &StepConfig,
) -> SoilStepOut {
    let water_in = tape.add(precip_rain, infiltration);
    let saturation = tape.div(soil_moisture, params.field_capacity);
    let one = tape.scalar(1.0);

    let effective_rainfall = match (cfg.variant.uses_nnr(), cfg.nnr) {
        (true, Some(nnr)) => nnr_forward(
            tape,
            nnr,
            params.field_capacity,
            runoff_shape,
            soil_moisture,
            saturation,
            water_in,
        ),
        _ => {
            let wetness = tape.min(tape.powv(saturation, runoff_shape), one);
            tape.mul(wetness, water_in)
        }
    };

    let soil_after_rain = tape.sub(tape.add(soil_moisture, water_in), effective_rainfall);
    let excess = tape.relu(tape.sub(soil_after_rain, params.field_capacity));
    let soil_after_excess = tape.sub(soil_after_rain, excess);

    let depletion_ratio = tape.div(
        soil_after_excess,
        tape.mul(params.field_capacity, params.et_depletion),
    );
    let efficiency = if cfg.variant.uses_et_exponent() {
        tape.min(tape.powv(depletion_ratio, et_shape), one)
    } else {
        tape.min(depletion_ratio, one)
    };
    let et_demand = tape.mul(efficiency, pet);
    let actual_et = tape.min(et_demand, soil_after_excess);
    let soil_next = tape.sub(soil_after_excess, actual_et);

    SoilStepOut {
        soil_moisture: soil_next,
        effective_rainfall,
        excess,
        actual_et,
    }
}

pub struct UpperZoneOut {
    pub upper_zone: Var,
    pub percolation: Var,
    pub fast_flow: Var,
    pub stormflow: Var,
}

/// Upper-zone update: inflow, percolation withdrawal, then fast flow above
/// the threshold, then stormflow from the remaining store.
pub fn upper_zone_step(
    tape: &Tape,
    upper_zone: Var,
    effective_rainfall: Var,
    excess: Var,
    params: &ParamVars,
) -> UpperZoneOut {
    let filled = tape.add(tape.add(upper_zone, effective_rainfall), excess);
    let percolation = tape.min(params.max_percolation, filled);
    let after_perc = tape.sub(filled, percolation);

    let fast_potential = tape.mul(
        params.fast_flow_coeff,
        tape.relu(tape.sub(after_perc, params.fast_flow_threshold)),
    );
    let fast_flow = tape.min(fast_potential, after_perc);
    let after_fast = tape.sub(after_perc, fast_flow);

    let storm_potential = tape.mul(params.stormflow_coeff, after_fast);
    let stormflow = tape.min(storm_potential, after_fast);
    let upper_next = tape.sub(after_fast, stormflow);

    UpperZoneOut {
        upper_zone: upper_next,
        percolation,
        fast_flow,
        stormflow,
    }
}

pub struct LowerZoneOut {
    pub lower_zone: Var,
    pub baseflow: Var,
}

/// Lower-zone update: percolation arrives, then baseflow recedes.
pub fn lower_zone_step(
    tape: &Tape,
    lower_zone: Var,
    percolation: Var,
    params: &ParamVars,
) -> LowerZoneOut {
    let filled = tape.add(lower_zone, percolation);
    let potential = tape.mul(params.baseflow_coeff, filled);
    let baseflow = tape.min(potential, filled);
    LowerZoneOut {
        lower_zone: tape.sub(filled, baseflow),
        baseflow,
    }
}

fn check_finite(tape: &Tape, vars: &[Var], sub_step: &'static str, day: usize) -> Result<(), HbvError> {
    for v in vars {
        if !tape.value(*v).all_finite() {
            return Err(HbvError::NonFinite { sub_step, day });
        }
    }
    Ok(())
}

/// One full day: partition, snow, soil, upper zone, lower zone. `day` only
/// labels error reports. The optional `runoff_shape`/`et_shape` override the
/// static columns for this day (already in physical units).
#[allow(clippy::too_many_arguments)]
pub fn hbv_step(
    tape: &Tape,
    state: &StateVars,
    precip: Var,
    temp: Var,
    pet: Var,
    params: &ParamVars,
    runoff_shape_today: Option<Var>,
    et_shape_today: Option<Var>,
    cfg: &StepConfig,
    day: usize,
) -> Result<(StateVars, FluxVars), HbvError> {
    check_finite(tape, &[precip, temp, pet], "input", day)?;

    let (precip_snow, precip_rain) = partition_precip(tape, precip, temp, params.threshold_temp);
    check_finite(tape, &[precip_snow, precip_rain], "partition", day)?;

    let snow = snow_step(
        tape,
        state.snowpack,
        state.snow_liquid,
        precip_snow,
        temp,
        params,
    );
    check_finite(
        tape,
        &[snow.snowpack, snow.snow_liquid, snow.infiltration],
        "snow",
        day,
    )?;

    let runoff_shape = runoff_shape_today.unwrap_or(params.runoff_shape);
    let et_shape = et_shape_today.unwrap_or(params.et_shape);
    let soil = soil_step(
        tape,
        state.soil_moisture,
        snow.infiltration,
        precip_rain,
        pet,
        params,
        runoff_shape,
        et_shape,
        cfg,
    );
    check_finite(
        tape,
        &[soil.soil_moisture, soil.effective_rainfall, soil.actual_et],
        "soil",
        day,
    )?;

    let upper = upper_zone_step(
        tape,
        state.upper_zone,
        soil.effective_rainfall,
        soil.excess,
        params,
    );
    check_finite(tape, &[upper.upper_zone, upper.fast_flow], "upper_zone", day)?;

    let lower = lower_zone_step(tape, state.lower_zone, upper.percolation, params);
    check_finite(tape, &[lower.lower_zone, lower.baseflow], "lower_zone", day)?;

    let discharge = tape.add(tape.add(upper.fast_flow, upper.stormflow), lower.baseflow);

    let next = StateVars {
        snowpack: snow.snowpack,
        snow_liquid: snow.snow_liquid,
        soil_moisture: soil.soil_moisture,
        upper_zone: upper.upper_zone,
        lower_zone: lower.lower_zone,
    };
    let fluxes = FluxVars {
        precip_snow,
        precip_rain,
        snowmelt: snow.snowmelt,
        refreeze: snow.refreeze,
        snow_infiltration: snow.infiltration,
        effective_rainfall: soil.effective_rainfall,
        excess: soil.excess,
        actual_et: soil.actual_et,
        percolation: upper.percolation,
        fast_flow: upper.fast_flow,
        stormflow: upper.stormflow,
        baseflow: lower.baseflow,
        discharge,
    };
    Ok((next, fluxes))
}
