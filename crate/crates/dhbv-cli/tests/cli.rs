//! End-to-end command tests through the compiled binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn dhbv() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dhbv"))
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("command runs");
    assert!(
        out.status.success(),
        "command failed:\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn exit_code(cmd: &mut Command) -> (i32, String) {
    let out = cmd.output().expect("command runs");
    (
        out.status.code().unwrap_or(-1),
        format!(
            "{}{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        ),
    )
}

/// Synthesize a small dataset once per test directory.
fn synth(dir: &Path, basins: usize, days: usize, seed: u64) -> PathBuf {
    run_ok(dhbv()
        .arg("synth")
        .arg("--basins")
        .arg(basins.to_string())
        .arg("--days")
        .arg(days.to_string())
        .arg("--seed")
        .arg(seed.to_string())
        .arg("--out")
        .arg(dir));
    dir.join("manifest.json")
}

/// Common train flags; callers add `--epochs` themselves.
fn train_args<'a>(cmd: &'a mut Command, manifest: &Path, out: &Path) -> &'a mut Command {
    cmd.arg("train")
        .arg("--manifest")
        .arg(manifest)
        .arg("--out")
        .arg(out)
        .arg("--variant")
        .arg("delta_gamma_beta")
        .arg("--hidden")
        .arg("8")
        .arg("--batch")
        .arg("3")
        .arg("--window")
        .arg("90")
        .arg("--warmup")
        .arg("45")
        .arg("--train-start")
        .arg("2000-01-01")
        .arg("--train-end")
        .arg("2000-12-31")
        .arg("--test-start")
        .arg("2001-01-01")
        .arg("--test-end")
        .arg("2001-04-30")
}

#[test]
fn clean_fixture_validates_with_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth(dir.path(), 2, 200, 5);
    let out = run_ok(dhbv().arg("validate").arg("--manifest").arg(&manifest));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("dataset ok: 2 basins"));
    assert!(text.contains("100.0%"));
}

#[test]
fn date_gap_fails_validation_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth(dir.path(), 2, 120, 5);
    // Remove one mid-file forcing row to open a gap.
    let forcing = dir.path().join("forcing/synth0000.csv");
    let text = std::fs::read_to_string(&forcing).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let poisoned: Vec<&str> = lines
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != 60)
        .map(|(_, l)| *l)
        .collect();
    std::fs::write(&forcing, poisoned.join("\n")).unwrap();

    let (code, output) = exit_code(dhbv().arg("validate").arg("--manifest").arg(&manifest));
    assert_eq!(code, 2, "output: {output}");
    assert!(output.contains("expected date"), "output: {output}");
}

#[test]
fn empty_manifest_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("manifest.json");
    std::fs::write(
        &manifest,
        r#"{"basins": [], "attributes_path": "attributes.csv", "flow_units": "mm_day"}"#,
    )
    .unwrap();
    let (code, output) = exit_code(dhbv().arg("validate").arg("--manifest").arg(&manifest));
    assert_eq!(code, 2, "output: {output}");
    assert!(output.contains("no basins"), "output: {output}");
}

#[test]
fn missing_manifest_flag_is_a_usage_error() {
    let (code, output) = exit_code(dhbv().arg("validate"));
    assert_eq!(code, 1, "output: {output}");
}

#[test]
fn bad_alpha_is_rejected_before_training() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth(dir.path(), 2, 300, 5);
    let run = dir.path().join("run");
    let (code, output) = exit_code(
        train_args(&mut dhbv(), &manifest, &run).arg("--alpha").arg("1.5"),
    );
    assert_eq!(code, 1, "output: {output}");
    assert!(output.contains("alpha"), "output: {output}");
}

#[test]
fn train_simulate_evaluate_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth(dir.path(), 3, 500, 9);
    let run = dir.path().join("run");
    let out = run_ok(train_args(&mut dhbv(), &manifest, &run).arg("--epochs").arg("2"));
    assert!(String::from_utf8_lossy(&out.stdout).contains("training finished"));
    assert!(run.join("checkpoint.json").exists());
    let trace = std::fs::read_to_string(run.join("loss_trace.csv")).unwrap();
    assert!(trace.starts_with("iteration,epoch,loss"));
    assert!(trace.lines().count() > 2);

    // Simulation files cover exactly the requested window.
    let sims = dir.path().join("sims");
    run_ok(dhbv()
        .arg("simulate")
        .arg("--manifest")
        .arg(&manifest)
        .arg("--checkpoint")
        .arg(run.join("checkpoint.json"))
        .arg("--out")
        .arg(&sims)
        .arg("--threads")
        .arg("2"));
    let sim_text = std::fs::read_to_string(sims.join("synth0000.csv")).unwrap();
    let mut lines = sim_text.lines();
    let header = lines.next().unwrap();
    assert_eq!(header.split(',').count(), 23);
    assert!(header.starts_with("date,precip_mm,temp_c,pet_mm,snowpack_mm"));
    // Warm-up rows are excluded: the first row is the test start.
    assert!(lines.next().unwrap().starts_with("2001-01-01"));

    // Deterministic rerun writes byte-identical files.
    let sims2 = dir.path().join("sims2");
    run_ok(dhbv()
        .arg("simulate")
        .arg("--manifest")
        .arg(&manifest)
        .arg("--checkpoint")
        .arg(run.join("checkpoint.json"))
        .arg("--out")
        .arg(&sims2));
    assert_eq!(
        std::fs::read(sims.join("synth0002.csv")).unwrap(),
        std::fs::read(sims2.join("synth0002.csv")).unwrap()
    );

    // Full evaluation with references.
    let report = dir.path().join("report");
    let out = run_ok(dhbv()
        .arg("evaluate")
        .arg("--manifest")
        .arg(&manifest)
        .arg("--sim-dir")
        .arg(&sims)
        .arg("--out")
        .arg(&report)
        .arg("--bfi-ref")
        .arg(dir.path().join("refs/bfi_reference.csv"))
        .arg("--et-ref")
        .arg(dir.path().join("refs/et"))
        .arg("--nse-filter")
        .arg("0.5"));
    assert!(String::from_utf8_lossy(&out.stdout).contains("median NSE"));
    for file in ["per_basin_metrics.csv", "summary.json", "nse_cdf.csv"] {
        assert!(report.join(file).exists(), "missing {file}");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(report.join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["n_basins"], 3);
    assert!(summary["median_et_correlation"].is_number());

    // Without an ET reference the ET fields are absent and the exit is
    // still zero.
    let report2 = dir.path().join("report2");
    run_ok(dhbv()
        .arg("evaluate")
        .arg("--manifest")
        .arg(&manifest)
        .arg("--sim-dir")
        .arg(&sims)
        .arg("--out")
        .arg(&report2));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(report2.join("summary.json")).unwrap())
            .unwrap();
    assert!(summary["median_et_correlation"].is_null());
    assert!(summary["bfi_spatial_r"].is_null());
}

#[test]
fn perfect_truth_simulation_evaluates_to_one() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth(dir.path(), 3, 400, 13);
    let report = dir.path().join("report");
    let out = run_ok(dhbv()
        .arg("evaluate")
        .arg("--manifest")
        .arg(&manifest)
        .arg("--sim-dir")
        .arg(dir.path().join("truth_simulation"))
        .arg("--out")
        .arg(&report)
        .arg("--bfi-ref")
        .arg(dir.path().join("refs/bfi_reference.csv"))
        .arg("--et-ref")
        .arg(dir.path().join("refs/et")));
    assert!(String::from_utf8_lossy(&out.stdout).contains("median NSE 1.0000"));
}

#[test]
fn resume_continues_the_loss_trace() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth(dir.path(), 2, 500, 17);
    let short = dir.path().join("short");
    run_ok(train_args(&mut dhbv(), &manifest, &short).arg("--epochs").arg("1"));
    let short_trace = std::fs::read_to_string(short.join("loss_trace.csv")).unwrap();

    let resumed = dir.path().join("resumed");
    run_ok(train_args(&mut dhbv(), &manifest, &resumed)
        .arg("--epochs")
        .arg("2")
        .arg("--resume")
        .arg(short.join("checkpoint.json")));
    let resumed_trace = std::fs::read_to_string(resumed.join("loss_trace.csv")).unwrap();

    // The resumed trace begins with the short run's rows and extends them.
    assert!(resumed_trace.starts_with(short_trace.trim_end()));
    assert!(resumed_trace.lines().count() > short_trace.lines().count());

    // And it matches an uninterrupted two-epoch run byte for byte.
    let full = dir.path().join("full");
    run_ok(train_args(&mut dhbv(), &manifest, &full).arg("--epochs").arg("2"));
    assert_eq!(
        std::fs::read(full.join("loss_trace.csv")).unwrap(),
        std::fs::read(resumed.join("loss_trace.csv")).unwrap()
    );
    assert_eq!(
        std::fs::read(full.join("checkpoint.json")).unwrap(),
        std::fs::read(resumed.join("checkpoint.json")).unwrap()
    );
}

#[test]
fn unknown_basin_in_simulate_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth(dir.path(), 2, 500, 21);
    let run = dir.path().join("run");
    run_ok(train_args(&mut dhbv(), &manifest, &run).arg("--epochs").arg("2"));
    let (code, output) = exit_code(dhbv()
        .arg("simulate")
        .arg("--manifest")
        .arg(&manifest)
        .arg("--checkpoint")
        .arg(run.join("checkpoint.json"))
        .arg("--out")
        .arg(dir.path().join("sims"))
        .arg("--basins")
        .arg("synth0000,nonexistent"));
    assert_eq!(code, 2, "output: {output}");
    assert!(output.contains("nonexistent"), "output: {output}");
}

#[test]
fn lstm_baseline_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth(dir.path(), 2, 500, 23);
    let run = dir.path().join("run");
    run_ok(train_args(&mut dhbv(), &manifest, &run)
        .arg("--epochs")
        .arg("2")
        .arg("--model")
        .arg("lstm_benchmark"));

    let sims = dir.path().join("sims");
    run_ok(dhbv()
        .arg("simulate")
        .arg("--manifest")
        .arg(&manifest)
        .arg("--checkpoint")
        .arg(run.join("checkpoint.json"))
        .arg("--out")
        .arg(&sims));
    let text = std::fs::read_to_string(sims.join("synth0000.csv")).unwrap();
    assert!(text.starts_with("date,discharge_mm,routed_discharge_mm"));

    // NSE-only evaluation: baseflow and ET metrics are absent.
    let report = dir.path().join("report");
    run_ok(dhbv()
        .arg("evaluate")
        .arg("--manifest")
        .arg(&manifest)
        .arg("--sim-dir")
        .arg(&sims)
        .arg("--out")
        .arg(&report)
        .arg("--bfi-ref")
        .arg(dir.path().join("refs/bfi_reference.csv")));
    let metrics = std::fs::read_to_string(report.join("per_basin_metrics.csv")).unwrap();
    let row = metrics.lines().nth(1).unwrap();
    let cells: Vec<&str> = row.split(',').collect();
    assert_eq!(cells[4], "", "bfi_sim should be empty, got {row}");
    assert_ne!(cells[5], "", "bfi_ref column should carry the reference");
}

#[test]
fn help_exits_zero() {
    let (code, output) = exit_code(dhbv().arg("--help"));
    assert_eq!(code, 0);
    assert!(output.contains("synth"));
    assert!(output.contains("evaluate"));
}
