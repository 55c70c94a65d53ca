use super::*;
use crate::hbv::ModelVariant;

fn write(path: &std::path::Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

/// A tiny hand-written two-basin dataset exercising the no-PET-column path,
/// cfs units, and flow gaps.
fn fixture(dir: &std::path::Path, poison: Option<&str>) -> std::path::PathBuf {
    let mut forcing_a = String::from("date,prcp_mm,tmin_c,tmax_c\n");
    let mut forcing_b = String::from("date,prcp_mm,tmin_c,tmax_c,tmean_c,pet_mm\n");
    let mut flow_a = String::from("date,flow_cfs\n");
    let mut flow_b = String::from("date,flow_cfs\n");
    let start = chrono::NaiveDate::from_ymd_opt(1990, 10, 1).unwrap();
    for i in 0..40i64 {
        let date = start + chrono::Days::new(i as u64);
        let date_str = if poison == Some("gap") && i == 20 {
            (date + chrono::Days::new(1)).to_string()
        } else {
            date.to_string()
        };
        forcing_a.push_str(&format!("{date_str},{},{},{}\n", i % 5, 3.0, 14.0));
        forcing_b.push_str(&format!("{date},{},{},{},{},{}\n", (i + 2) % 7, 1.0, 9.0, 5.0, 2.1));
        // Basin a has two masked flow days.
        if i == 11 {
            flow_a.push_str(&format!("{date},\n"));
        } else if i != 12 {
            flow_a.push_str(&format!("{date},{}\n", 10.0 + i as f64));
        }
        flow_b.push_str(&format!("{date},{}\n", 4.2));
    }
    write(&dir.join("forcing_a.csv"), &forcing_a);
    write(&dir.join("forcing_b.csv"), &forcing_b);
    write(&dir.join("flow_a.csv"), &flow_a);
    write(&dir.join("flow_b.csv"), &flow_b);

    let mut attrs = format!("basin_id,{}\n", ATTRIBUTE_NAMES.join(","));
    for id in ["a", "b"] {
        let cells: Vec<String> = ATTRIBUTE_NAMES
            .iter()
            .map(|name| {
                if is_categorical(name) {
                    "forest".to_string()
                } else {
                    "1.5".to_string()
                }
            })
            .collect();
        attrs.push_str(&format!("{id},{}\n", cells.join(",")));
    }
    write(&dir.join("attributes.csv"), &attrs);

    let manifest = serde_json::json!({
        "basins": [
            {"id": "a", "lat": 38.5, "area_km2": 120.0,
             "forcing_path": "forcing_a.csv", "flow_path": "flow_a.csv"},
            {"id": "b", "lat": 41.0, "area_km2": 300.0,
             "forcing_path": "forcing_b.csv", "flow_path": "flow_b.csv"},
        ],
        "attributes_path": "attributes.csv",
        "flow_units": "cfs",
    });
    let path = dir.join("manifest.json");
    write(&path, &serde_json::to_string_pretty(&manifest).unwrap());
    path
}

#[test]
fn toy_fixture_loads_with_full_coverage() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = fixture(dir.path(), None);
    let ds = load_dataset(&manifest).unwrap();
    assert_eq!(ds.n_basins(), 2);
    assert_eq!(ds.len(), 40);
    // Basin a has exactly two masked days (one empty cell, one absent row).
    let coverage = ds.coverage();
    assert_eq!(coverage[0].valid_days, 38);
    assert_eq!(coverage[1].valid_days, 40);
    // PET was computed where absent and copied where present.
    assert!(ds.forcings[0].pet.iter().all(|&p| p > 0.0));
    assert!(ds.forcings[1].pet.iter().all(|&p| (p - 2.1).abs() < 1e-12));
    // cfs became mm/day using the basin area.
    let expected = cfs_to_mm_per_day(4.2, 300.0).unwrap();
    assert!((ds.observations[1].flow[0] - expected).abs() < 1e-12);
}

#[test]
fn date_gap_is_reported_with_the_date() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = fixture(dir.path(), Some("gap"));
    let err = load_dataset(&manifest).unwrap_err();
    match err {
        DataError::DateGap { basin, line, .. } => {
            assert_eq!(basin, "a");
            assert_eq!(line, 22);
        }
        other => panic!("unexpected error {other}"),
    }
}

#[test]
fn missing_file_names_the_basin() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = fixture(dir.path(), None);
    std::fs::remove_file(dir.path().join("flow_b.csv")).unwrap();
    let err = load_dataset(&manifest).unwrap_err();
    assert!(matches!(err, DataError::MissingFile { ref basin, .. } if basin == "b"));
}

#[test]
fn synthetic_dataset_is_seed_reproducible() {
    let cfg = SynthConfig::new(3, 120, 42);
    let a = synthesize_dataset(&cfg).unwrap();
    let b = synthesize_dataset(&cfg).unwrap();
    assert_eq!(a.dataset.forcings[1].precip, b.dataset.forcings[1].precip);
    assert_eq!(a.dataset.observations[2].flow, b.dataset.observations[2].flow);
    assert_eq!(a.truth_params[0], b.truth_params[0]);
    let c = synthesize_dataset(&SynthConfig::new(3, 120, 43)).unwrap();
    assert_ne!(a.dataset.observations[0].flow, c.dataset.observations[0].flow);
}

#[test]
fn synthetic_observations_match_truth_simulation_exactly() {
    let cfg = SynthConfig::new(2, 200, 7);
    let synth = synthesize_dataset(&cfg).unwrap();
    for (obs, sim) in synth.dataset.observations.iter().zip(&synth.truth_sims) {
        assert_eq!(obs.flow, sim.fluxes.routed_discharge);
        assert!(obs.flow.iter().all(|&q| q >= 0.0));
    }
    // Mass consistency: total discharge cannot exceed total precipitation
    // plus the water initially in storage (soil at half capacity plus the
    // 10 mm lower zone, carried through the internal spin-up year).
    for (b, sim) in synth.truth_sims.iter().enumerate() {
        let p: f64 = synth.dataset.forcings[b].precip.iter().sum::<f64>()
            + synth.truth_params[b].field_capacity;
        let q: f64 = sim.fluxes.discharge.iter().sum();
        assert!(q <= p + 400.0, "basin {b}: discharge {q} vs precip {p}");
    }
}

#[test]
fn synthetic_roundtrip_through_files_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SynthConfig::new(2, 90, 11);
    let synth = synthesize_dataset(&cfg).unwrap();
    let manifest = write_dataset(&synth, dir.path()).unwrap();
    let loaded = load_dataset(&manifest).unwrap();
    assert_eq!(loaded.n_basins(), 2);
    for b in 0..2 {
        assert_eq!(loaded.forcings[b].precip, synth.dataset.forcings[b].precip);
        assert_eq!(loaded.forcings[b].pet, synth.dataset.forcings[b].pet);
        assert_eq!(loaded.observations[b].flow, synth.dataset.observations[b].flow);
        assert_eq!(loaded.basins[b].attributes, synth.dataset.basins[b].attributes);
    }
    assert_eq!(loaded.vocab, synth.dataset.vocab);
}

#[test]
fn noisy_observations_differ_but_stay_nonnegative() {
    let mut cfg = SynthConfig::new(1, 150, 3);
    cfg.obs_noise = 0.2;
    let noisy = synthesize_dataset(&cfg).unwrap();
    let clean = synthesize_dataset(&SynthConfig::new(1, 150, 3)).unwrap();
    assert_ne!(noisy.dataset.observations[0].flow, clean.dataset.observations[0].flow);
    assert!(noisy.dataset.observations[0].flow.iter().all(|&q| q >= 0.0));
}

#[test]
fn generator_rejects_gate_network_truth() {
    let mut cfg = SynthConfig::new(1, 60, 1);
    cfg.truth_variant = ModelVariant::DeltaNnr;
    assert!(std::panic::catch_unwind(|| synthesize_dataset(&cfg)).is_err());
}

#[test]
fn simulation_csv_roundtrip() {
    let cfg = SynthConfig::new(1, 80, 19);
    let synth = synthesize_dataset(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sim.csv");
    write_simulation_csv(&path, &synth.dataset.forcings[0], 0, &synth.truth_sims[0]).unwrap();
    let table = read_simulation_csv(&path).unwrap();
    assert_eq!(table.start, synth.dataset.forcings[0].start);
    assert_eq!(table.discharge, synth.truth_sims[0].fluxes.discharge);
    assert_eq!(
        table.routed_discharge,
        synth.truth_sims[0].fluxes.routed_discharge
    );
    assert_eq!(table.baseflow, synth.truth_sims[0].fluxes.baseflow);
    assert_eq!(table.actual_et, synth.truth_sims[0].fluxes.actual_et);
}
