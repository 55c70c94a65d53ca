use std::path::Path;

use chrono::NaiveDate;

use dhbv::data::{load_dataset, read_simulation_csv, SimTable};
use dhbv::evaluation::{
    evaluate_simulations, write_nse_cdf_csv, write_per_basin_csv, write_summary_json, References,
};

use crate::config::RunConfig;
use crate::CliError;

pub fn run(
    cfg: &RunConfig,
    sim_dir: Option<&Path>,
    start: Option<NaiveDate>,
    end: Option<NaiveDate>,
) -> Result<(), CliError> {
    let manifest = cfg.require_manifest()?;
    let out = cfg.require_output_dir()?;
    std::fs::create_dir_all(out)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", out.display())))?;
    let sim_dir =
        sim_dir.ok_or_else(|| CliError::Usage("no simulation directory given (--sim-dir)".into()))?;

    let dataset = load_dataset(manifest)?;
    let mut sims: Vec<(usize, SimTable)> = Vec::new();
    for (b, basin) in dataset.basins.iter().enumerate() {
        let path = sim_dir.join(format!("{}.csv", basin.id));
        if path.exists() {
            sims.push((b, read_simulation_csv(&path)?));
        }
    }
    if sims.is_empty() {
        return Err(CliError::Data(format!(
            "no simulation files in {} match the manifest's basins",
            sim_dir.display()
        )));
    }

    let ids: Vec<String> = dataset.basins.iter().map(|b| b.id.clone()).collect();
    let refs = References::load(
        cfg.eval.bfi_reference.as_deref(),
        cfg.eval.et_reference.as_deref(),
        &ids,
    )?;

    let report =
        evaluate_simulations(&dataset, &sims, &refs, start, end, cfg.eval.nse_filter)?;
    for (id, reason) in &report.skipped {
        eprintln!("warning: basin {id} skipped: {reason}");
    }

    write_per_basin_csv(&out.join("per_basin_metrics.csv"), &report.metrics)?;
    write_summary_json(&out.join("summary.json"), &report.summary)?;
    write_nse_cdf_csv(&out.join("nse_cdf.csv"), &report.metrics)?;

    let summary = &report.summary;
    println!(
        "evaluated {} basins: median NSE {:.4}",
        summary.n_basins, summary.median_nse
    );
    if let Some(r) = summary.bfi_spatial_r {
        println!("baseflow-index spatial correlation: {r:.4}");
    }
    if let Some(r) = summary.median_et_correlation {
        println!("median ET correlation: {r:.4}");
    }
    println!("reports written to {}", out.display());
    Ok(())
}
