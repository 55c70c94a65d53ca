#![allow(clippy::type_complexity, clippy::needless_range_loop)]

//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with its measured numbers (run with `--nocapture` to see
//! them). The synthetic-twin training fixture is shared across criteria.

use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::Instant;

use chrono::NaiveDate;
use dhbv::autodiff::{check_scalar_gradients, Mat, Tape, Var};
use dhbv::data::{synthesize_dataset, SimTable, SynthConfig, SyntheticDataset};
use dhbv::evaluation::{
    bfi_sim, et_8day_composite, evaluate_simulations, median, nse, EtComposite, References,
};
use dhbv::hbv::{
    hbv_rollout, hbv_simulate, DayInput, DynamicParams, ForcingView, HbvState, ModelVariant,
    ParamRanges, ParamVars, StateVars, StepConfig,
};
use dhbv::neural::{lstm_step, LstmParams, NnrConfig, NnrNet};
use dhbv::routing::{gamma_uh, route, UnitHydrograph};
use dhbv::training::{
    compute_loss, predict, train, Checkpoint, ModelKind, PredictionFlow, TrainingConfig,
};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TWIN_SEED: u64 = 42;
const TWIN_BASINS: usize = 20;
const TWIN_DAYS: usize = 2192; // six calendar years from 2000-01-01

fn twin() -> &'static SyntheticDataset {
    static TWIN: OnceLock<SyntheticDataset> = OnceLock::new();
    TWIN.get_or_init(|| {
        synthesize_dataset(&SynthConfig::new(TWIN_BASINS, TWIN_DAYS, TWIN_SEED)).unwrap()
    })
}

fn twin_config(variant: ModelVariant) -> TrainingConfig {
    TrainingConfig {
        model: ModelKind::Hbv,
        variant,
        batch_basins: 20,
        window_days: 365,
        warmup_days: 365,
        alpha: 0.25,
        epochs: 50,
        learning_rate: 1e-3,
        hidden_size: 32,
        seed: TWIN_SEED,
        train_start: NaiveDate::from_ymd_opt(2000, 1, 1).unwrap(),
        train_end: NaiveDate::from_ymd_opt(2003, 12, 31).unwrap(),
        test_start: NaiveDate::from_ymd_opt(2004, 1, 1).unwrap(),
        test_end: NaiveDate::from_ymd_opt(2005, 12, 31).unwrap(),
        ..TrainingConfig::default()
    }
}

/// The criterion-5 training, shared by criteria 5, 6, and 7.
fn trained_twin() -> &'static (Checkpoint, f64) {
    static TRAINED: OnceLock<(Checkpoint, f64)> = OnceLock::new();
    TRAINED.get_or_init(|| {
        let start = Instant::now();
        let cfg = twin_config(ModelVariant::DeltaGammaBeta);
        let outcome = train(&twin().dataset, &cfg, None, |_| Ok(())).unwrap();
        (outcome.checkpoint, start.elapsed().as_secs_f64())
    })
}

/// Held-out NSE per basin for a trained checkpoint.
fn heldout_nse(ckpt: &Checkpoint) -> Vec<f64> {
    let dataset = &twin().dataset;
    let cfg = &ckpt.config;
    let basins: Vec<usize> = (0..dataset.n_basins()).collect();
    let preds = predict(dataset, ckpt, &basins, cfg.test_start, cfg.test_end).unwrap();
    preds
        .iter()
        .map(|p| {
            let PredictionFlow::Simulated(sim) = &p.flow else {
                panic!("expected simulated output");
            };
            let lo = p.warmup_days;
            let axis0 = p.sim_offset + lo;
            let n = sim.fluxes.routed_discharge.len() - lo;
            let obs = &dataset.observations[p.basin];
            nse(
                &sim.fluxes.routed_discharge[lo..],
                &obs.flow[axis0..axis0 + n],
                &obs.mask[axis0..axis0 + n],
            )
            .unwrap()
        })
        .collect()
}

fn random_params(rng: &mut ChaCha8Rng) -> Vec<f64> {
    ParamRanges::default()
        .ordered()
        .iter()
        .map(|r| r.map01(rng.random_range(0.15..0.85)))
        .collect()
}

#[test]
fn criterion_1_gradient_correctness() {
    let start = Instant::now();

    // Every elementary operation, 100 random in-domain draws each.
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for draw in 0..100 {
        let x = rng.random_range(0.06..3.0);
        let y = rng.random_range(0.06..3.0);
        let unary: Vec<(&str, Box<dyn Fn(&Tape, &[Var]) -> Var>)> = vec![
            ("exp", Box::new(|t: &Tape, v: &[Var]| t.exp(v[0]))),
            ("ln", Box::new(|t: &Tape, v: &[Var]| t.ln(v[0]))),
            ("log10", Box::new(|t: &Tape, v: &[Var]| t.log10(v[0]))),
            ("sqrt", Box::new(|t: &Tape, v: &[Var]| t.sqrt(v[0]))),
            ("abs", Box::new(|t: &Tape, v: &[Var]| t.abs(v[0]))),
            ("sigmoid", Box::new(|t: &Tape, v: &[Var]| t.sigmoid(v[0]))),
            ("tanh", Box::new(|t: &Tape, v: &[Var]| t.tanh(v[0]))),
            ("relu", Box::new(|t: &Tape, v: &[Var]| t.relu(v[0]))),
            ("lgamma", Box::new(|t: &Tape, v: &[Var]| t.lgamma(v[0]))),
            ("pow_const", Box::new(|t: &Tape, v: &[Var]| t.powc(v[0], 1.7))),
            (
                "clamp",
                Box::new(|t: &Tape, v: &[Var]| t.clamp(v[0], 0.5, 2.5)),
            ),
            ("neg", Box::new(|t: &Tape, v: &[Var]| t.neg(v[0]))),
        ];
        for (name, f) in unary {
            let report = check_scalar_gradients(f, &[x], 1e-6);
            assert!(
                report.passes(1e-4),
                "draw {draw} op {name}: rel err {}",
                report.max_rel_err
            );
        }
        let binary: Vec<(&str, Box<dyn Fn(&Tape, &[Var]) -> Var>)> = vec![
            ("add", Box::new(|t: &Tape, v: &[Var]| t.add(v[0], v[1]))),
            ("sub", Box::new(|t: &Tape, v: &[Var]| t.sub(v[0], v[1]))),
            ("mul", Box::new(|t: &Tape, v: &[Var]| t.mul(v[0], v[1]))),
            ("div", Box::new(|t: &Tape, v: &[Var]| t.div(v[0], v[1]))),
            ("min", Box::new(|t: &Tape, v: &[Var]| t.min(v[0], v[1]))),
            ("max", Box::new(|t: &Tape, v: &[Var]| t.max(v[0], v[1]))),
            ("powv", Box::new(|t: &Tape, v: &[Var]| t.powv(v[0], v[1]))),
        ];
        if (x - y).abs() > 1e-4 {
            for (name, f) in binary {
                let report = check_scalar_gradients(f, &[x, y], 1e-6);
                assert!(
                    report.passes(1e-4),
                    "draw {draw} op {name}: rel err {}",
                    report.max_rel_err
                );
            }
        }
        // Matrix structure ops on small random matrices.
        let m = dhbv::autodiff::Value::Matrix(Mat::from_fn(2, 3, |_, _| {
            rng.random_range(-1.0..1.0)
        }));
        let n = dhbv::autodiff::Value::Matrix(Mat::from_fn(3, 2, |_, _| {
            rng.random_range(-1.0..1.0)
        }));
        let report = dhbv::autodiff::check_gradients(
            |t, v| t.sum(t.matmul(v[0], v[1])),
            &[m, n],
            1e-6,
        );
        assert!(report.passes(1e-4), "matmul rel err {}", report.max_rel_err);
    }

    // 30-day simulation + routing + loss composition, differentiated with
    // respect to all 15 physical parameters, 100 random draws.
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let forcing: Vec<(f64, f64, f64)> = (0..30)
        .map(|d| {
            let p = if d % 3 == 0 {
                rng.random_range(0.0..18.0)
            } else {
                0.0
            };
            (
                p,
                rng.random_range(-4.0..22.0),
                rng.random_range(0.5..5.0),
            )
        })
        .collect();
    let obs: Vec<f64> = (0..30).map(|_| rng.random_range(0.1..6.0)).collect();

    for draw in 0..100 {
        let params = random_params(&mut rng);
        let forcing = forcing.clone();
        let obs = obs.clone();
        let f = move |tape: &Tape, vars: &[Var]| {
            let p = ParamVars {
                threshold_temp: vars[0],
                degree_day_factor: vars[1],
                refreeze_factor: vars[2],
                holding_capacity: vars[3],
                field_capacity: vars[4],
                et_depletion: vars[5],
                runoff_shape: vars[6],
                et_shape: vars[7],
                max_percolation: vars[8],
                fast_flow_coeff: vars[9],
                fast_flow_threshold: vars[10],
                stormflow_coeff: vars[11],
                baseflow_coeff: vars[12],
                routing_shape: vars[13],
                routing_scale: vars[14],
            };
            let init = StateVars::constants(
                tape,
                &[HbvState {
                    snowpack: 4.0,
                    snow_liquid: 0.2,
                    soil_moisture: 55.0,
                    upper_zone: 9.0,
                    lower_zone: 70.0,
                }],
            );
            let cfg = StepConfig::new(ModelVariant::Delta, None).unwrap();
            let col = |v: f64| tape.matrix(Mat::column(&[v]));
            let days: Vec<DayInput> = forcing
                .iter()
                .map(|&(p, t, e)| DayInput {
                    precip: col(p),
                    temp: col(t),
                    pet: col(e),
                    runoff_shape: None,
                    et_shape: None,
                })
                .collect();
            let rollout = hbv_rollout(tape, &days, init, &p, &cfg).unwrap();
            let uh = dhbv::routing::gamma_uh_on_tape(tape, p.routing_shape, p.routing_scale, 15);
            let q: Vec<Var> = rollout.fluxes.iter().map(|f| f.discharge).collect();
            let routed = dhbv::routing::route_on_tape(tape, &q, &[], &uh);
            let obs_days: Vec<Vec<f64>> = obs.iter().map(|&o| vec![o]).collect();
            let masks = vec![vec![true]; obs.len()];
            let (total, _, _) =
                dhbv::training::composite_loss_on_tape(tape, &routed, &obs_days, &masks, 0.25)
                    .unwrap();
            total
        };
        let report = check_scalar_gradients(f, &params, 1e-6);
        for e in &report.entries {
            let rel = (e.analytic - e.numeric).abs() / (e.numeric.abs() + 1e-8);
            assert!(
                rel < 1e-4 || (e.analytic - e.numeric).abs() < 1e-8,
                "draw {draw} param {}: analytic {} numeric {}",
                ParamRanges::ordered_names()[e.input],
                e.analytic,
                e.numeric
            );
        }
    }

    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs() < 60,
        "criterion 1 overran: {elapsed:?}"
    );
    println!("criterion 1 (gradient correctness): PASS in {elapsed:.2?}");
}

#[test]
fn criterion_2_mass_conservation() {
    let start = Instant::now();
    let synth = synthesize_dataset(&SynthConfig::new(10, 730, 77)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let nnr = NnrNet::init(NnrConfig::default(), &mut rng);

    let mut checked_days = 0usize;
    for variant in ModelVariant::ALL {
        for b in 0..10 {
            let forcing = &synth.dataset.forcings[b];
            let params = &synth.truth_params[b];
            let dynamics = DynamicParams {
                runoff_shape: variant
                    .dynamic_runoff_shape()
                    .then(|| (0..730).map(|d| 2.0 + (d as f64 / 90.0).sin().abs()).collect()),
                et_shape: variant
                    .dynamic_et_shape()
                    .then(|| (0..730).map(|d| 1.5 + (d as f64 / 120.0).cos().abs()).collect()),
            };
            let out = hbv_simulate(
                ForcingView {
                    precip: &forcing.precip,
                    temp: &forcing.t_mean,
                    pet: &forcing.pet,
                },
                params,
                Some(&dynamics),
                variant,
                variant.uses_nnr().then_some(&nnr),
                365,
            )
            .unwrap();
            let mut prev = HbvState::initial(params).total();
            for d in 0..730 {
                let total = out.states.snowpack[d]
                    + out.states.snow_liquid[d]
                    + out.states.soil_moisture[d]
                    + out.states.upper_zone[d]
                    + out.states.lower_zone[d];
                let residual = (total - prev)
                    - (forcing.precip[d] - out.fluxes.actual_et[d] - out.fluxes.discharge[d]);
                assert!(
                    residual.abs() < 1e-8,
                    "variant {variant:?} basin {b} day {d}: residual {residual}"
                );
                prev = total;
                checked_days += 1;
            }
        }
    }
    assert_eq!(checked_days, 6 * 10 * 730);

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "criterion 2 overran: {elapsed:?}");
    println!(
        "criterion 2 (mass conservation, {checked_days} basin-days): PASS in {elapsed:.2?}"
    );
}

#[test]
fn criterion_3_routing_properties() {
    let start = Instant::now();

    // Kernel normalization over a 200-point parameter grid.
    let ranges = ParamRanges::default();
    let mut grid_points = 0usize;
    for i in 0..20 {
        for j in 0..10 {
            let shape = ranges.routing_shape.lo
                + (i as f64 + 0.5) / 20.0 * (ranges.routing_shape.hi - ranges.routing_shape.lo);
            let scale = ranges.routing_scale.lo
                + (j as f64 + 0.5) / 10.0 * (ranges.routing_scale.hi - ranges.routing_scale.lo);
            let uh = gamma_uh(shape, scale, 15);
            let total: f64 = uh.weights().iter().sum();
            assert!(
                (total - 1.0).abs() < 1e-9,
                "kernel sum {total} at ({shape}, {scale})"
            );
            assert!(uh.weights().iter().all(|&w| w >= 0.0));
            grid_points += 1;
        }
    }
    assert_eq!(grid_points, 200);

    // Brute-force convolution oracle.
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let uh = gamma_uh(1.7, 2.4, 12);
    let runoff: Vec<f64> = (0..200).map(|_| rng.random_range(0.0..15.0)).collect();
    let routed = route(&runoff, &uh);
    for t in 0..runoff.len() {
        let mut oracle = 0.0;
        for (i, w) in uh.weights().iter().enumerate() {
            if i <= t {
                oracle += w * runoff[t - i];
            }
        }
        assert!((routed[t] - oracle).abs() < 1e-12, "day {t}");
    }

    // Constant input reaches the input as steady state.
    let constant = vec![3.7; 50];
    let routed = route(&constant, &uh);
    for &q in &routed[12..] {
        assert!((q - 3.7).abs() < 1e-12);
    }
    // And the identity kernel is exact.
    assert_eq!(route(&runoff, &UnitHydrograph::delta(5)), runoff);

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "criterion 3 overran: {elapsed:?}");
    println!("criterion 3 (routing properties): PASS in {elapsed:.2?}");
}

#[test]
fn criterion_4_formula_fixtures() {
    let start = Instant::now();

    // Flow transform at zero is exactly -1.
    assert_eq!(dhbv::data::flow_transform(0.0).unwrap(), -1.0);

    // Composite loss hand case (one basin, two days) to 1e-12.
    let sim = Mat::from_vec(1, 2, vec![2.0, 2.0]);
    let obs = Mat::from_vec(1, 2, vec![1.0, 4.0]);
    let mask = Mat::filled(1, 2, 1.0);
    let terms = compute_loss(&sim, &obs, &mask, 0.25).unwrap();
    let plain = (5.0f64 / 2.0).sqrt();
    let f = |q: f64| (q.sqrt() + 0.1).log10();
    let transformed = (((f(2.0) - f(1.0)).powi(2) + (f(2.0) - f(4.0)).powi(2)) / 2.0).sqrt();
    assert!((terms.plain - plain).abs() < 1e-12);
    assert!((terms.transformed - transformed).abs() < 1e-12);
    assert!((terms.total - (0.75 * plain + 0.25 * transformed)).abs() < 1e-12);

    // NSE identities are exact.
    let series = [1.0, 2.0, 3.0, 4.0];
    let mask4 = [true; 4];
    assert_eq!(nse(&series, &series, &mask4).unwrap(), 1.0);
    assert_eq!(nse(&[2.5; 4], &series, &mask4).unwrap(), 0.0);

    // Hargreaves zero cases.
    assert_eq!(dhbv::data::hargreaves_pet(12.0, 12.0, 12.0, 30.0).unwrap(), 0.0);
    assert_eq!(
        dhbv::data::hargreaves_pet(-20.0, -15.6, -17.8, 30.0).unwrap(),
        0.0
    );

    // LSTM cell against the direct-formula oracle on random small cases.
    let sigmoid = |x: f64| 1.0 / (1.0 + (-x).exp());
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for _ in 0..25 {
        let p = LstmParams::init(2, 2, &mut rng);
        let draw =
            |rng: &mut ChaCha8Rng| (0..2).map(|_| rng.random_range(-1.2..1.2)).collect::<Vec<f64>>();
        let (x, h, c) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));

        let tape = Tape::new();
        let vars = p.leaf(&tape, false);
        let (hv, cv) = lstm_step(
            &tape,
            &vars,
            tape.matrix(Mat::row(&x)),
            tape.matrix(Mat::row(&h)),
            tape.matrix(Mat::row(&c)),
        );
        let h_tape = tape.matrix_value(hv);
        let c_tape = tape.matrix_value(cv);

        for j in 0..2 {
            let mut pre = [0.0; 4];
            for (g, slot) in pre.iter_mut().enumerate() {
                let r = g * 2 + j;
                let mut acc = p.bias.get(0, r);
                for k in 0..2 {
                    acc += p.input_weights.get(r, k) * x[k] + p.hidden_weights.get(r, k) * h[k];
                }
                *slot = acc;
            }
            let c_ref = sigmoid(pre[1]) * c[j] + sigmoid(pre[0]) * pre[2].tanh();
            let h_ref = sigmoid(pre[3]) * c_ref.tanh();
            assert!((c_tape.get(0, j) - c_ref).abs() < 1e-12);
            assert!((h_tape.get(0, j) - h_ref).abs() < 1e-12);
        }
    }

    let elapsed = start.elapsed();
    println!("criterion 4 (formula fixtures): PASS in {elapsed:.2?}");
}

#[test]
fn criterion_5_synthetic_twin_recovery() {
    let (ckpt, train_secs) = trained_twin();
    let start = Instant::now();
    let nses = heldout_nse(ckpt);
    let eval_secs = start.elapsed().as_secs_f64();

    let med = median(&nses);
    let min = nses.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(
        med >= 0.85,
        "median held-out NSE {med:.4} below 0.85 (per basin: {nses:.3?})"
    );
    assert!(
        min >= 0.5,
        "worst held-out NSE {min:.4} below 0.5 (per basin: {nses:.3?})"
    );
    let total = train_secs + eval_secs;
    assert!(
        total < 900.0,
        "criterion 5 overran: {total:.1}s"
    );
    println!(
        "criterion 5 (synthetic-twin recovery): PASS, median NSE {med:.4}, min {min:.4}, {total:.1}s"
    );
}

#[test]
fn criterion_6_variant_ordering() {
    let baseline_cfg = twin_config(ModelVariant::OriginalHbv);
    let baseline = train(&twin().dataset, &baseline_cfg, None, |_| Ok(())).unwrap();
    let baseline_median = median(&heldout_nse(&baseline.checkpoint));

    let static_cfg = twin_config(ModelVariant::Delta);
    let static_delta = train(&twin().dataset, &static_cfg, None, |_| Ok(())).unwrap();
    let static_median = median(&heldout_nse(&static_delta.checkpoint));

    let (dynamic_ckpt, _) = trained_twin();
    let dynamic_median = median(&heldout_nse(dynamic_ckpt));

    const SLACK: f64 = 0.02;
    assert!(
        dynamic_median >= baseline_median - SLACK,
        "dynamic-parameter variant {dynamic_median:.4} fell more than {SLACK} below the original {baseline_median:.4}"
    );
    assert!(
        static_median >= baseline_median - SLACK,
        "exponent variant {static_median:.4} fell more than {SLACK} below the original {baseline_median:.4}"
    );
    println!(
        "criterion 6 (variant ordering): PASS, medians original {baseline_median:.4} <= delta {static_median:.4} / dynamic {dynamic_median:.4} (slack {SLACK})"
    );
}

#[test]
fn criterion_7_determinism() {
    let (first, _) = trained_twin();
    let cfg = twin_config(ModelVariant::DeltaGammaBeta);
    let second = train(&twin().dataset, &cfg, None, |_| Ok(())).unwrap();

    let bytes_a = serde_json::to_vec(first).unwrap();
    let bytes_b = serde_json::to_vec(&second.checkpoint).unwrap();
    assert_eq!(bytes_a, bytes_b, "checkpoints differ between identical runs");

    let dir = tempfile::tempdir().unwrap();
    let trace_a = dir.path().join("a.csv");
    let trace_b = dir.path().join("b.csv");
    first.write_trace_csv(&trace_a).unwrap();
    second.checkpoint.write_trace_csv(&trace_b).unwrap();
    assert_eq!(
        std::fs::read(&trace_a).unwrap(),
        std::fs::read(&trace_b).unwrap(),
        "loss traces differ between identical runs"
    );
    println!(
        "criterion 7 (determinism): PASS, {} checkpoint bytes identical",
        bytes_a.len()
    );
}

#[test]
fn criterion_8_diagnostics_self_consistency() {
    let synth = twin();
    let dataset = &synth.dataset;

    // Baseflow index is a fraction for every basin.
    for (b, sim) in synth.truth_sims.iter().enumerate() {
        let bfi = bfi_sim(&sim.fluxes.baseflow, &sim.fluxes.discharge).unwrap();
        assert!((0.0..=1.0).contains(&bfi), "basin {b}: BFI {bfi}");
    }

    // Evaluating the generator's own output against itself is perfect.
    let sims: Vec<(usize, SimTable)> = synth
        .truth_sims
        .iter()
        .enumerate()
        .map(|(b, sim)| {
            (
                b,
                SimTable {
                    start: dataset.start(),
                    discharge: sim.fluxes.discharge.clone(),
                    routed_discharge: sim.fluxes.routed_discharge.clone(),
                    baseflow: sim.fluxes.baseflow.clone(),
                    actual_et: sim.fluxes.actual_et.clone(),
                },
            )
        })
        .collect();
    let bfi_ref: BTreeMap<String, f64> = synth
        .truth_sims
        .iter()
        .enumerate()
        .map(|(b, sim)| {
            (
                dataset.basins[b].id.clone(),
                bfi_sim(&sim.fluxes.baseflow, &sim.fluxes.discharge).unwrap(),
            )
        })
        .collect();
    let et_ref: BTreeMap<String, Vec<EtComposite>> = synth
        .truth_sims
        .iter()
        .enumerate()
        .map(|(b, sim)| {
            (
                dataset.basins[b].id.clone(),
                et_8day_composite(&sim.fluxes.actual_et, dataset.start()),
            )
        })
        .collect();
    let refs = References {
        bfi: Some(bfi_ref),
        et: Some(et_ref),
    };
    let evaluation =
        evaluate_simulations(dataset, &sims, &refs, None, None, Some(0.5)).unwrap();
    assert!(
        evaluation.skipped.is_empty(),
        "skipped basins: {:?}",
        evaluation.skipped
    );
    for m in &evaluation.metrics {
        assert!((m.nse - 1.0).abs() < 1e-9, "{}: NSE {}", m.basin_id, m.nse);
        assert!(
            (m.et_correlation.unwrap() - 1.0).abs() < 1e-9,
            "{}: ET correlation {:?}",
            m.basin_id,
            m.et_correlation
        );
    }
    assert!((evaluation.summary.bfi_spatial_r.unwrap() - 1.0).abs() < 1e-9);
    assert!((evaluation.summary.median_et_correlation.unwrap() - 1.0).abs() < 1e-9);
    println!(
        "criterion 8 (diagnostics self-consistency): PASS over {} basins",
        evaluation.metrics.len()
    );
}

