//! Seeded synthetic datasets with a known ground-truth parameter map.
//!
//! Each basin draws four latent factors (wetness, coldness, permeability,
//! relief). Attributes and the true model parameters are smooth functions
//! of the same latents, so a regionalization network can recover the
//! parameters from the attributes. Forcings are seasonal sinusoids with
//! stochastic wet days; observations are the routed discharge of the truth
//! simulation, optionally noise-corrupted.
//!
//! The truth simulation runs one extra internal year before the published
//! record so day zero already carries realistic states.

use chrono::{Datelike, Days, NaiveDate};
use rand::RngExt;
use rand_chacha::ChaCha8Rng;

use crate::hbv::{
    hbv_simulate, ForcingView, ModelVariant, ParamRanges, SimulationOutput, StaticParams,
    PARAM_COUNT,
};
use crate::rng::named_rng;

use super::attributes::{encode_attributes, BasinRecord, RawAttributeRow, ATTRIBUTE_NAMES};
use super::loader::Dataset;
use super::series::{ForcingSeries, ObservationSeries};
use super::DataError;

#[derive(Clone, Debug)]
pub struct SynthConfig {
    pub n_basins: usize,
    pub n_days: usize,
    pub seed: u64,
    pub start: NaiveDate,
    pub truth_variant: ModelVariant,
    /// Relative multiplicative observation noise; zero keeps observations
    /// exactly equal to the truth simulation.
    pub obs_noise: f64,
    pub ranges: ParamRanges,
}

impl SynthConfig {
    pub fn new(n_basins: usize, n_days: usize, seed: u64) -> SynthConfig {
        SynthConfig {
            n_basins,
            n_days,
            seed,
            start: NaiveDate::from_ymd_opt(2000, 1, 1).unwrap(),
            truth_variant: ModelVariant::Delta,
            obs_noise: 0.0,
            ranges: ParamRanges::default(),
        }
    }
}

/// A synthetic dataset plus its generating truth.
pub struct SyntheticDataset {
    pub dataset: Dataset,
    pub truth_params: Vec<StaticParams>,
    /// Truth simulation over the published axis (internal spin-up removed).
    pub truth_sims: Vec<SimulationOutput>,
    /// Raw attribute cells (labels unencoded) for file export.
    pub raw_attributes: Vec<(String, Vec<String>)>,
}

struct Latents {
    wet: f64,
    cold: f64,
    perm: f64,
    relief: f64,
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller from two uniforms.
    let u1: f64 = rng.random_range(1e-12..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn truth_unit_fractions(l: &Latents, rng: &mut ChaCha8Rng) -> [f64; PARAM_COUNT] {
    let jitter = |rng: &mut ChaCha8Rng| rng.random_range(-0.04..0.04);
    let mut fracs = [
        0.4 + 0.2 * l.cold,          // threshold_temp
        0.2 + 0.4 * l.cold,          // degree_day_factor
        0.2 + 0.4 * l.cold,          // refreeze_factor
        0.3 + 0.3 * l.wet,           // holding_capacity
        0.15 + 0.5 * (1.0 - l.perm), // field_capacity
        0.3 + 0.4 * l.wet,           // et_depletion
        0.2 + 0.6 * (1.0 - l.wet),   // runoff_shape
        0.3 + 0.5 * l.wet,           // et_shape
        0.15 + 0.5 * l.perm,         // max_percolation
        0.2 + 0.4 * l.relief,        // fast_flow_coeff
        0.1 + 0.4 * l.relief,        // fast_flow_threshold
        0.15 + 0.4 * l.perm,         // stormflow_coeff
        0.15 + 0.5 * l.perm,         // baseflow_coeff
        0.25 + 0.4 * l.relief,       // routing_shape
        0.2 + 0.4 * l.relief,        // routing_scale
    ];
    for f in fracs.iter_mut() {
        *f = (*f + jitter(rng)).clamp(0.08, 0.92);
    }
    fracs
}

fn land_cover(l: &Latents) -> &'static str {
    ["shrubland", "grassland", "cropland", "forest"][((l.wet * 3.999) as usize).min(3)]
}

fn geology(l: &Latents) -> (&'static str, &'static str) {
    const CLASSES: [&str; 4] = ["shale", "sandstone", "carbonate", "volcanic"];
    let first = ((l.perm * 3.999) as usize).min(3);
    (CLASSES[first], CLASSES[(first + 1) % 4])
}

fn attribute_cells(l: &Latents, _lat: f64, area: f64, rng: &mut ChaCha8Rng) -> Vec<String> {
    let j = |rng: &mut ChaCha8Rng, s: f64| rng.random_range(-s..s);
    let p_mean = 1.2 + 4.5 * l.wet + j(rng, 0.1);
    let pet_mean = 1.5 + 2.5 * (1.0 - l.wet) + j(rng, 0.1);
    let sand = 15.0 + 70.0 * l.perm + j(rng, 2.0);
    let silt = (100.0 - sand) * 0.6;
    let (geo1, geo2) = geology(l);
    let values: Vec<(usize, String)> = ATTRIBUTE_NAMES
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let v = match *name {
                "p_mean" => p_mean,
                "pet_mean" => pet_mean,
                "p_seasonality" => -0.4 + 0.8 * l.cold + j(rng, 0.05),
                "frac_snow" => 0.02 + 0.55 * l.cold + j(rng, 0.02),
                "aridity" => pet_mean / p_mean,
                "high_prec_freq" => 8.0 + 25.0 * l.wet + j(rng, 1.0),
                "high_prec_dur" => 1.0 + 2.0 * l.wet + j(rng, 0.1),
                "low_prec_freq" => 150.0 + 150.0 * (1.0 - l.wet) + j(rng, 5.0),
                "low_prec_dur" => 3.0 + 10.0 * (1.0 - l.wet) + j(rng, 0.5),
                "elev_mean" => 100.0 + 2800.0 * l.cold * l.relief + j(rng, 20.0),
                "slope_mean" => 5.0 + 120.0 * l.relief + j(rng, 2.0),
                "area_gages2" => area,
                "frac_forest" => (0.1 + 0.8 * l.wet + j(rng, 0.03)).clamp(0.0, 1.0),
                "lai_max" => 0.5 + 5.0 * l.wet + j(rng, 0.1),
                "lai_diff" => 0.2 + 3.0 * l.wet * l.cold + j(rng, 0.1),
                "gvf_max" => (0.2 + 0.7 * l.wet + j(rng, 0.02)).clamp(0.0, 1.0),
                "gvf_diff" => 0.05 + 0.4 * l.wet * l.cold + j(rng, 0.02),
                "dom_land_cover_frac" => (0.4 + 0.5 * l.wet + j(rng, 0.03)).clamp(0.0, 1.0),
                "dom_land_cover" => return (i, land_cover(l).to_string()),
                "root_depth_50" => 0.2 + 2.0 * l.wet + j(rng, 0.05),
                "soil_depth_pelletier" => 1.0 + 30.0 * (1.0 - l.relief) + j(rng, 1.0),
                "soil_depth_statgso" => 0.5 + 1.2 * (1.0 - l.relief) + j(rng, 0.05),
                "soil_porosity" => 0.3 + 0.25 * l.perm + j(rng, 0.01),
                "soil_conductivity" => 0.5 + 10.0 * l.perm + j(rng, 0.2),
                "max_water_content" => 0.05 + 0.4 * (1.0 - l.perm) + j(rng, 0.01),
                "sand_frac" => sand,
                "silt_frac" => silt,
                "clay_frac" => 100.0 - sand - silt,
                "geol_class_1st" => return (i, geo1.to_string()),
                "geol_class_1st_frac" => (0.5 + 0.4 * l.perm + j(rng, 0.02)).clamp(0.0, 1.0),
                "geol_class_2nd" => return (i, geo2.to_string()),
                "geol_class_2nd_frac" => (0.3 + 0.2 * (1.0 - l.perm) + j(rng, 0.02)).clamp(0.0, 1.0),
                "carbonate_rocks_frac" => (0.05 + 0.5 * l.perm + j(rng, 0.02)).clamp(0.0, 1.0),
                "geol_porosity" => 0.05 + 0.2 * l.perm + j(rng, 0.01),
                "geol_permeability" => -16.0 + 3.0 * l.perm + j(rng, 0.1),
                other => unreachable!("unhandled attribute {other}"),
            };
            (i, format!("{v}"))
        })
        .collect();
    values.into_iter().map(|(_, s)| s).collect()
}

struct BasinForcing {
    forcing: ForcingSeries,
}

fn generate_forcing(
    l: &Latents,
    latitude: f64,
    p_mean_target: f64,
    start: NaiveDate,
    total_days: usize,
    rng: &mut ChaCha8Rng,
) -> Result<BasinForcing, DataError> {
    let t_base = 15.5 - 11.0 * l.cold;
    let t_amp = 7.0 + 6.0 * l.cold;
    let mut precip = Vec::with_capacity(total_days);
    let mut t_min = Vec::with_capacity(total_days);
    let mut t_max = Vec::with_capacity(total_days);
    let mut t_mean = Vec::with_capacity(total_days);
    let mut pet = Vec::with_capacity(total_days);
    for d in 0..total_days {
        let date = start + Days::new(d as u64);
        let doy = date.ordinal() as f64;
        let season = (2.0 * std::f64::consts::PI * (doy - 196.0) / 365.25).cos();
        let temp = t_base + t_amp * season + 1.8 * normal(rng);
        let diurnal = 7.0 + 3.0 * rng.random_range(0.0..1.0);
        let lo = temp - 0.5 * diurnal;
        let hi = temp + 0.5 * diurnal;

        let wet_prob = (0.22 + 0.08 * (2.0 * std::f64::consts::PI * (doy - 60.0) / 365.25).sin()
            + 0.15 * l.wet)
            .clamp(0.05, 0.85);
        let p = if rng.random_range(0.0..1.0) < wet_prob {
            let scale = p_mean_target / wet_prob;
            (-scale * rng.random_range(1e-12_f64..1.0).ln()).min(150.0)
        } else {
            0.0
        };

        let ra = super::pet::extraterrestrial_radiation(latitude, date.ordinal())?;
        let ep = super::pet::hargreaves_pet(lo, hi, temp, ra)?;
        precip.push(p);
        t_min.push(lo);
        t_max.push(hi);
        t_mean.push(temp);
        pet.push(ep);
    }
    Ok(BasinForcing {
        forcing: ForcingSeries {
            start,
            precip,
            t_min,
            t_max,
            t_mean,
            pet,
        },
    })
}

/// Internal spin-up length prepended to the published record.
const SPINUP_DAYS: usize = 365;

fn slice_sim(sim: &SimulationOutput, skip: usize) -> SimulationOutput {
    let cut = |v: &Vec<f64>| v[skip..].to_vec();
    SimulationOutput {
        states: crate::hbv::StateSeries {
            snowpack: cut(&sim.states.snowpack),
            snow_liquid: cut(&sim.states.snow_liquid),
            soil_moisture: cut(&sim.states.soil_moisture),
            upper_zone: cut(&sim.states.upper_zone),
            lower_zone: cut(&sim.states.lower_zone),
        },
        fluxes: crate::hbv::FluxSeries {
            precip_snow: cut(&sim.fluxes.precip_snow),
            precip_rain: cut(&sim.fluxes.precip_rain),
            snowmelt: cut(&sim.fluxes.snowmelt),
            refreeze: cut(&sim.fluxes.refreeze),
            snow_infiltration: cut(&sim.fluxes.snow_infiltration),
            effective_rainfall: cut(&sim.fluxes.effective_rainfall),
            excess: cut(&sim.fluxes.excess),
            actual_et: cut(&sim.fluxes.actual_et),
            percolation: cut(&sim.fluxes.percolation),
            fast_flow: cut(&sim.fluxes.fast_flow),
            stormflow: cut(&sim.fluxes.stormflow),
            baseflow: cut(&sim.fluxes.baseflow),
            discharge: cut(&sim.fluxes.discharge),
            routed_discharge: cut(&sim.fluxes.routed_discharge),
        },
        warmup_days: 0,
    }
}

/// Generate a full dataset with known ground truth. Deterministic in the
/// seed.
pub fn synthesize_dataset(cfg: &SynthConfig) -> Result<SyntheticDataset, DataError> {
    assert!(cfg.n_basins >= 1, "need at least one basin");
    assert!(cfg.n_days >= 30, "need at least a month of data");
    assert!(
        !cfg.truth_variant.uses_nnr(),
        "gate-network truth is not supported by the generator"
    );

    let total_days = cfg.n_days + SPINUP_DAYS;
    let internal_start = cfg.start - Days::new(SPINUP_DAYS as u64);

    let mut raw_rows = Vec::with_capacity(cfg.n_basins);
    let mut raw_attributes = Vec::with_capacity(cfg.n_basins);
    let mut truth_params = Vec::with_capacity(cfg.n_basins);
    let mut truth_sims = Vec::with_capacity(cfg.n_basins);
    let mut forcings = Vec::with_capacity(cfg.n_basins);
    let mut observations = Vec::with_capacity(cfg.n_basins);
    let mut meta = Vec::with_capacity(cfg.n_basins);

    for b in 0..cfg.n_basins {
        let mut rng = named_rng(cfg.seed, &format!("synth/basin/{b}"));
        let latents = Latents {
            wet: rng.random_range(0.0..1.0),
            cold: rng.random_range(0.0..1.0),
            perm: rng.random_range(0.0..1.0),
            relief: rng.random_range(0.0..1.0),
        };
        let latitude = 32.0 + 14.0 * latents.cold + rng.random_range(-0.5..0.5);
        let area = 60.0 + 2500.0 * latents.relief + rng.random_range(0.0..50.0);
        let id = format!("synth{b:04}");

        let cells = attribute_cells(&latents, latitude, area, &mut rng);
        let p_mean_target: f64 = cells[0].parse().expect("p_mean cell is numeric");
        raw_rows.push(RawAttributeRow {
            basin_id: id.clone(),
            cells: cells.clone(),
        });
        raw_attributes.push((id.clone(), cells));

        let fracs = truth_unit_fractions(&latents, &mut rng);
        let params = cfg.ranges.params_from_unit(&fracs);
        truth_params.push(params);

        let gen = generate_forcing(
            &latents,
            latitude,
            p_mean_target,
            internal_start,
            total_days,
            &mut rng,
        )?;
        let sim = hbv_simulate(
            ForcingView {
                precip: &gen.forcing.precip,
                temp: &gen.forcing.t_mean,
                pet: &gen.forcing.pet,
            },
            &params,
            None,
            cfg.truth_variant,
            None,
            SPINUP_DAYS,
        )
        .map_err(|e| DataError::Generator {
            basin: id.clone(),
            detail: e.to_string(),
        })?;
        let published_sim = slice_sim(&sim, SPINUP_DAYS);

        let mut flow = published_sim.fluxes.routed_discharge.clone();
        if cfg.obs_noise > 0.0 {
            for q in flow.iter_mut() {
                *q = (*q * (1.0 + cfg.obs_noise * normal(&mut rng))).max(0.0);
            }
        }
        observations.push(ObservationSeries {
            start: cfg.start,
            mask: vec![true; flow.len()],
            flow,
        });

        let published_forcing = ForcingSeries {
            start: cfg.start,
            precip: gen.forcing.precip[SPINUP_DAYS..].to_vec(),
            t_min: gen.forcing.t_min[SPINUP_DAYS..].to_vec(),
            t_max: gen.forcing.t_max[SPINUP_DAYS..].to_vec(),
            t_mean: gen.forcing.t_mean[SPINUP_DAYS..].to_vec(),
            pet: gen.forcing.pet[SPINUP_DAYS..].to_vec(),
        };
        forcings.push(published_forcing);
        truth_sims.push(published_sim);
        meta.push((id, latitude, area));
    }

    let (encoded, vocab) = encode_attributes(&raw_rows)?;
    let basins = meta
        .into_iter()
        .map(|(id, latitude, area_km2)| BasinRecord {
            attributes: encoded[&id].clone(),
            id,
            latitude,
            area_km2,
        })
        .collect();

    Ok(SyntheticDataset {
        dataset: Dataset {
            basins,
            forcings,
            observations,
            vocab,
        },
        truth_params,
        truth_sims,
        raw_attributes,
    })
}

/// Write the dataset in the on-disk schema (forcing and flow CSVs, the
/// attribute table, a manifest, and the truth parameter table). Returns the
/// manifest path.
pub fn write_dataset(
    synth: &SyntheticDataset,
    dir: &std::path::Path,
) -> Result<std::path::PathBuf, DataError> {
    use std::io::Write;

    let io_err = |path: &std::path::Path| {
        let p = path.display().to_string();
        move |e: std::io::Error| DataError::Io { path: p.clone(), source: e }
    };

    std::fs::create_dir_all(dir.join("forcing")).map_err(io_err(dir))?;
    std::fs::create_dir_all(dir.join("flow")).map_err(io_err(dir))?;

    let ds = &synth.dataset;
    for (basin, forcing) in ds.basins.iter().zip(&ds.forcings) {
        let path = dir.join("forcing").join(format!("{}.csv", basin.id));
        let mut f = std::fs::File::create(&path).map_err(io_err(&path))?;
        writeln!(f, "date,prcp_mm,tmin_c,tmax_c,tmean_c,pet_mm").map_err(io_err(&path))?;
        for i in 0..forcing.len() {
            writeln!(
                f,
                "{},{},{},{},{},{}",
                forcing.date(i),
                forcing.precip[i],
                forcing.t_min[i],
                forcing.t_max[i],
                forcing.t_mean[i],
                forcing.pet[i]
            )
            .map_err(io_err(&path))?;
        }
    }

    for (basin, (forcing, obs)) in ds.basins.iter().zip(ds.forcings.iter().zip(&ds.observations)) {
        let path = dir.join("flow").join(format!("{}.csv", basin.id));
        let mut f = std::fs::File::create(&path).map_err(io_err(&path))?;
        writeln!(f, "date,flow_mm_day").map_err(io_err(&path))?;
        for i in 0..obs.len() {
            if obs.mask[i] {
                writeln!(f, "{},{}", forcing.date(i), obs.flow[i]).map_err(io_err(&path))?;
            } else {
                writeln!(f, "{},", forcing.date(i)).map_err(io_err(&path))?;
            }
        }
    }

    let attr_path = dir.join("attributes.csv");
    {
        let mut f = std::fs::File::create(&attr_path).map_err(io_err(&attr_path))?;
        writeln!(f, "basin_id,{}", ATTRIBUTE_NAMES.join(",")).map_err(io_err(&attr_path))?;
        for (id, cells) in &synth.raw_attributes {
            writeln!(f, "{},{}", id, cells.join(",")).map_err(io_err(&attr_path))?;
        }
    }

    let truth_path = dir.join("truth_params.csv");
    {
        let mut f = std::fs::File::create(&truth_path).map_err(io_err(&truth_path))?;
        writeln!(
            f,
            "basin_id,{}",
            ParamRanges::ordered_names().join(",")
        )
        .map_err(io_err(&truth_path))?;
        for (basin, p) in ds.basins.iter().zip(&synth.truth_params) {
            let vals = crate::hbv::params_ordered(p);
            let cells: Vec<String> = vals.iter().map(|v| format!("{v}")).collect();
            writeln!(f, "{},{}", basin.id, cells.join(",")).map_err(io_err(&truth_path))?;
        }
    }

    let manifest = super::manifest::Manifest {
        basins: ds
            .basins
            .iter()
            .map(|b| super::manifest::ManifestBasin {
                id: b.id.clone(),
                lat: b.latitude,
                area_km2: b.area_km2,
                forcing_path: format!("forcing/{}.csv", b.id),
                flow_path: format!("flow/{}.csv", b.id),
            })
            .collect(),
        attributes_path: "attributes.csv".into(),
        flow_units: super::manifest::FlowUnits::MmDay,
    };
    let manifest_path = dir.join("manifest.json");
    manifest.write(&manifest_path)?;
    Ok(manifest_path)
}
