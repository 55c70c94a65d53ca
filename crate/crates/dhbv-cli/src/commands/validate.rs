use dhbv::data::load_dataset;

use crate::config::RunConfig;
use crate::CliError;

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let manifest = cfg.require_manifest()?;
    let dataset = load_dataset(manifest)?;
    println!(
        "dataset ok: {} basins, {} days ({} to {})",
        dataset.n_basins(),
        dataset.len(),
        dataset.start(),
        dataset.end()
    );
    println!("basin_id  valid_days  total_days  coverage");
    for c in dataset.coverage() {
        println!(
            "{:<9} {:>10}  {:>10}  {:>7.1}%",
            c.basin_id,
            c.valid_days,
            c.total_days,
            100.0 * c.valid_days as f64 / c.total_days.max(1) as f64
        );
    }
    Ok(())
}
