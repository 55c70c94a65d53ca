//! `dhbv`: dataset synthesis and validation, training, simulation, and
//! evaluation for the differentiable HBV toolkit, driven by one JSON
//! config with flag overrides.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data
//! validation error, 3 runtime or numerical error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Parser, Subcommand};

use dhbv::data::DataError;
use dhbv::evaluation::EvalError;
use dhbv::hbv::{HbvError, ModelVariant};
use dhbv::training::TrainError;

use config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    /// Bad invocation or configuration (exit 1).
    Usage(String),
    /// Dataset validation failure (exit 2).
    Data(String),
    /// Runtime or numerical failure (exit 3).
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        match e {
            DataError::Io { .. } => CliError::Runtime(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<TrainError> for CliError {
    fn from(e: TrainError) -> Self {
        match e {
            TrainError::Config(_) => CliError::Usage(e.to_string()),
            TrainError::Data(inner) => inner.into(),
            TrainError::NoValidWindows => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<HbvError> for CliError {
    fn from(e: HbvError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Io { .. } => CliError::Runtime(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "dhbv",
    version,
    about = "Differentiable HBV hydrologic modeling pipeline"
)]
struct Cli {
    /// JSON run configuration; command-line flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a dataset manifest and print a coverage report.
    Validate {
        /// Dataset manifest JSON.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Generate a seeded synthetic dataset with known ground truth,
    /// reference files, and the truth simulation.
    Synth {
        /// Number of basins.
        #[arg(long, default_value_t = 20)]
        basins: usize,
        /// Record length in days.
        #[arg(long, default_value_t = 2192)]
        days: usize,
        /// Generator seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Relative observation noise (0 keeps observations exact).
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// First published date (YYYY-MM-DD).
        #[arg(long)]
        start: Option<NaiveDate>,
    },
    /// Train a model and write the checkpoint and loss trace.
    Train {
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Output directory for checkpoint.json and loss_trace.csv.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Continue from an existing checkpoint.
        #[arg(long)]
        resume: Option<PathBuf>,
        /// Model kind: hbv or lstm_benchmark.
        #[arg(long)]
        model: Option<String>,
        /// Process-model variant (original_hbv, delta, delta_beta,
        /// delta_gamma, delta_gamma_beta, delta_nnr).
        #[arg(long)]
        variant: Option<ModelVariant>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Recurrent hidden size.
        #[arg(long)]
        hidden: Option<usize>,
        #[arg(long = "learning-rate")]
        learning_rate: Option<f64>,
        /// Minibatch size in basins.
        #[arg(long)]
        batch: Option<usize>,
        /// Training window length in days.
        #[arg(long)]
        window: Option<usize>,
        /// Warm-up length in days.
        #[arg(long)]
        warmup: Option<usize>,
        /// Low-flow loss weight in [0, 1].
        #[arg(long)]
        alpha: Option<f64>,
        /// Optimizer: adam, adadelta, or sgd.
        #[arg(long)]
        optimizer: Option<String>,
        #[arg(long = "train-start")]
        train_start: Option<NaiveDate>,
        #[arg(long = "train-end")]
        train_end: Option<NaiveDate>,
        #[arg(long = "test-start")]
        test_start: Option<NaiveDate>,
        #[arg(long = "test-end")]
        test_end: Option<NaiveDate>,
    },
    /// Simulate basins with a trained checkpoint and write per-basin flux
    /// CSVs.
    Simulate {
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated basin ids (default: all basins).
        #[arg(long)]
        basins: Option<String>,
        /// First output date (default: the checkpoint's test period).
        #[arg(long)]
        start: Option<NaiveDate>,
        /// Last output date.
        #[arg(long)]
        end: Option<NaiveDate>,
        /// Worker thread cap.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Evaluate simulation CSVs against observations and references.
    Evaluate {
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Directory of per-basin simulation CSVs.
        #[arg(long = "sim-dir")]
        sim_dir: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Baseflow-index reference CSV (basin_id,bfi).
        #[arg(long = "bfi-ref")]
        bfi_ref: Option<PathBuf>,
        /// Directory of per-basin ET composite reference CSVs.
        #[arg(long = "et-ref")]
        et_ref: Option<PathBuf>,
        /// Report the baseflow-index correlation over basins above this
        /// NSE too.
        #[arg(long = "nse-filter")]
        nse_filter: Option<f64>,
        #[arg(long)]
        start: Option<NaiveDate>,
        #[arg(long)]
        end: Option<NaiveDate>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Validate { manifest } => {
            if let Some(m) = manifest {
                cfg.manifest = Some(m);
            }
            commands::validate::run(&cfg)
        }
        Command::Synth {
            basins,
            days,
            seed,
            out,
            noise,
            start,
        } => {
            if let Some(o) = out {
                cfg.output_dir = Some(o);
            }
            commands::synth::run(&cfg, basins, days, seed, noise, start)
        }
        Command::Train {
            manifest,
            out,
            resume,
            model,
            variant,
            epochs,
            seed,
            hidden,
            learning_rate,
            batch,
            window,
            warmup,
            alpha,
            optimizer,
            train_start,
            train_end,
            test_start,
            test_end,
        } => {
            if let Some(m) = manifest {
                cfg.manifest = Some(m);
            }
            if let Some(o) = out {
                cfg.output_dir = Some(o);
            }
            let t = &mut cfg.train;
            if let Some(m) = model {
                t.model = match m.as_str() {
                    "hbv" => dhbv::training::ModelKind::Hbv,
                    "lstm_benchmark" => dhbv::training::ModelKind::LstmBenchmark,
                    other => {
                        return Err(CliError::Usage(format!(
                            "unknown model '{other}' (expected hbv or lstm_benchmark)"
                        )))
                    }
                };
            }
            if let Some(v) = variant {
                t.variant = v;
            }
            if let Some(v) = epochs {
                t.epochs = v;
            }
            if let Some(v) = seed {
                t.seed = v;
            }
            if let Some(v) = hidden {
                t.hidden_size = v;
            }
            if let Some(v) = learning_rate {
                t.learning_rate = v;
            }
            if let Some(v) = batch {
                t.batch_basins = v;
            }
            if let Some(v) = window {
                t.window_days = v;
            }
            if let Some(v) = warmup {
                t.warmup_days = v;
            }
            if let Some(v) = alpha {
                if !(0.0..=1.0).contains(&v) {
                    return Err(CliError::Usage(format!(
                        "alpha must lie in [0, 1], got {v}"
                    )));
                }
                t.alpha = v;
            }
            if let Some(o) = optimizer {
                t.optimizer = match o.as_str() {
                    "adam" => dhbv::training::OptimizerKind::Adam,
                    "adadelta" => dhbv::training::OptimizerKind::Adadelta,
                    "sgd" => dhbv::training::OptimizerKind::Sgd,
                    other => {
                        return Err(CliError::Usage(format!(
                            "unknown optimizer '{other}' (expected adam, adadelta, or sgd)"
                        )))
                    }
                };
            }
            if let Some(v) = train_start {
                t.train_start = v;
            }
            if let Some(v) = train_end {
                t.train_end = v;
            }
            if let Some(v) = test_start {
                t.test_start = v;
            }
            if let Some(v) = test_end {
                t.test_end = v;
            }
            commands::train::run(&cfg, resume.as_deref())
        }
        Command::Simulate {
            manifest,
            checkpoint,
            out,
            basins,
            start,
            end,
            threads,
        } => {
            if let Some(m) = manifest {
                cfg.manifest = Some(m);
            }
            if let Some(c) = checkpoint {
                cfg.checkpoint = Some(c);
            }
            if let Some(o) = out {
                cfg.output_dir = Some(o);
            }
            if let Some(n) = threads {
                cfg.threads = n.max(1);
            }
            commands::simulate::run(&cfg, basins.as_deref(), start, end)
        }
        Command::Evaluate {
            manifest,
            sim_dir,
            out,
            bfi_ref,
            et_ref,
            nse_filter,
            start,
            end,
        } => {
            if let Some(m) = manifest {
                cfg.manifest = Some(m);
            }
            if let Some(o) = out {
                cfg.output_dir = Some(o);
            }
            if let Some(p) = bfi_ref {
                cfg.eval.bfi_reference = Some(p);
            }
            if let Some(p) = et_ref {
                cfg.eval.et_reference = Some(p);
            }
            if let Some(f) = nse_filter {
                cfg.eval.nse_filter = Some(f);
            }
            commands::evaluate::run(&cfg, sim_dir.as_deref(), start, end)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version displays are successes; everything else is a
            // usage error.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
