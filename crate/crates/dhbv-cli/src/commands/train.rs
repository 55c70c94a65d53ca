use std::path::Path;

use dhbv::data::load_dataset;
use dhbv::training::{train, Checkpoint};

use crate::config::RunConfig;
use crate::CliError;

pub fn run(cfg: &RunConfig, resume: Option<&Path>) -> Result<(), CliError> {
    let manifest = cfg.require_manifest()?;
    let out = cfg.require_output_dir()?;
    std::fs::create_dir_all(out)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", out.display())))?;

    let dataset = load_dataset(manifest)?;
    let resume_ckpt = resume.map(Checkpoint::load).transpose()?;
    if let Some(ckpt) = &resume_ckpt {
        println!("resuming from epoch {}", ckpt.epoch);
    }

    let ckpt_path = out.join("checkpoint.json");
    let trace_path = out.join("loss_trace.csv");
    let outcome = train(&dataset, &cfg.train, resume_ckpt, |snapshot| {
        snapshot.save(&ckpt_path)?;
        snapshot.write_trace_csv(&trace_path)?;
        let last = snapshot
            .loss_history
            .last()
            .expect("an epoch has at least one iteration");
        println!(
            "epoch {:>4}/{}: loss {:.6} (rmse {:.6}, transformed {:.6})",
            snapshot.epoch, snapshot.config.epochs, last.loss, last.plain, last.transformed
        );
        Ok(())
    })?;

    println!(
        "training finished after {} epochs; checkpoint {}",
        outcome.checkpoint.epoch,
        ckpt_path.display()
    );
    Ok(())
}
