use chrono::NaiveDate;

use dhbv::data::{synthesize_dataset, write_dataset, write_simulation_csv, SynthConfig};
use dhbv::evaluation::{bfi_sim, et_8day_composite, write_bfi_reference, write_et_reference};

use crate::config::RunConfig;
use crate::CliError;

pub fn run(
    cfg: &RunConfig,
    basins: usize,
    days: usize,
    seed: Option<u64>,
    noise: f64,
    start: Option<NaiveDate>,
) -> Result<(), CliError> {
    let out = cfg.require_output_dir()?;
    let mut synth_cfg = SynthConfig::new(basins, days, seed.unwrap_or(cfg.train.seed));
    synth_cfg.obs_noise = noise;
    synth_cfg.ranges = cfg.train.param_ranges;
    if let Some(s) = start {
        synth_cfg.start = s;
    }

    let synth = synthesize_dataset(&synth_cfg)?;
    let manifest = write_dataset(&synth, out)?;

    // Reference files derived from the truth simulation, in the same
    // formats the evaluate command consumes.
    let refs_dir = out.join("refs");
    let et_dir = refs_dir.join("et");
    std::fs::create_dir_all(&et_dir)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", et_dir.display())))?;
    let bfi_rows: Vec<(String, f64)> = synth
        .dataset
        .basins
        .iter()
        .zip(&synth.truth_sims)
        .map(|(b, sim)| {
            Ok((
                b.id.clone(),
                bfi_sim(&sim.fluxes.baseflow, &sim.fluxes.discharge)?,
            ))
        })
        .collect::<Result<_, dhbv::evaluation::EvalError>>()?;
    write_bfi_reference(&refs_dir.join("bfi_reference.csv"), &bfi_rows)?;
    for (b, sim) in synth.dataset.basins.iter().zip(&synth.truth_sims) {
        let comps = et_8day_composite(&sim.fluxes.actual_et, synth.dataset.start());
        write_et_reference(&et_dir.join(format!("{}.csv", b.id)), &comps)?;
    }

    // The truth simulation itself, for perfect-score pipeline checks.
    let sim_dir = out.join("truth_simulation");
    std::fs::create_dir_all(&sim_dir)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", sim_dir.display())))?;
    for ((b, forcing), sim) in synth
        .dataset
        .basins
        .iter()
        .zip(&synth.dataset.forcings)
        .zip(&synth.truth_sims)
    {
        write_simulation_csv(&sim_dir.join(format!("{}.csv", b.id)), forcing, 0, sim)?;
    }

    println!(
        "wrote {} basins x {} days to {} (manifest {})",
        basins,
        days,
        out.display(),
        manifest.display()
    );
    Ok(())
}
