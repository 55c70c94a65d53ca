//! The training loop.
//!
//! Each iteration samples a minibatch of (basin, window) pairs, runs the
//! parameterization network over the warm-up days without gradients to
//! settle its recurrent state, runs it over the window on the tape, maps
//! the unit-interval outputs onto physical ranges, spins the water stores
//! up through the warm-up without gradients, simulates the window on the
//! tape, routes, computes the composite loss, and applies one optimizer
//! update. RNG streams are re-derived per epoch from the seed, so a resumed
//! run continues exactly where an uninterrupted run would be.

use crate::autodiff::{Mat, Tape, Var};
use crate::data::{flow_transform, Dataset, NormStats};
use crate::hbv::{
    hbv_rollout, DayInput, HbvState, ModelVariant, ParamVars, StateVars, StepConfig, PARAM_COUNT,
};
use crate::neural::{
    lstm_streamflow_forward, param_net_forward, NnrConfig, NnrNet, ParamNet, ParamNetConfig,
    StreamflowLstm,
};
use crate::rng::named_rng;
use crate::routing::{gamma_uh_on_tape, route_on_tape};

use super::checkpoint::{Checkpoint, LossRow, NamedMat, NormBundle, CHECKPOINT_VERSION};
use super::loss::{composite_loss_on_tape, LossTerms};
use super::optimizer::Optimizer;
use super::sampler::{sample_minibatch, WindowSample};
use super::{ModelKind, TrainError, TrainingConfig};

pub struct TrainOutcome {
    pub checkpoint: Checkpoint,
}

pub(crate) enum ModelState {
    Hbv {
        param_net: ParamNet,
        nnr: Option<NnrNet>,
    },
    Lstm {
        net: StreamflowLstm,
    },
}

impl ModelState {
    pub(crate) fn init(cfg: &TrainingConfig) -> ModelState {
        let mut rng = named_rng(cfg.seed, "init");
        match cfg.model {
            ModelKind::Hbv => {
                let net_cfg = ParamNetConfig {
                    attribute_dim: crate::data::attribute_count(),
                    forcing_dim: 3,
                    hidden: cfg.hidden_size,
                    static_outputs: PARAM_COUNT,
                    dynamic_outputs: cfg.variant.dynamic_count(),
                };
                let param_net = ParamNet::init(net_cfg, &mut rng);
                let nnr = cfg.variant.uses_nnr().then(|| {
                    NnrNet::init(
                        NnrConfig {
                            hidden: cfg.nnr_hidden.clone(),
                        },
                        &mut rng,
                    )
                });
                ModelState::Hbv { param_net, nnr }
            }
            ModelKind::LstmBenchmark => {
                let input_dim = 3 + crate::data::attribute_count();
                ModelState::Lstm {
                    net: StreamflowLstm::init(cfg.hidden_size, input_dim, &mut rng),
                }
            }
        }
    }

    pub(crate) fn from_checkpoint(
        cfg: &TrainingConfig,
        ckpt: &Checkpoint,
    ) -> Result<ModelState, TrainError> {
        if ckpt.config.model != cfg.model
            || ckpt.config.variant != cfg.variant
            || ckpt.config.hidden_size != cfg.hidden_size
        {
            return Err(TrainError::Checkpoint {
                path: "<loaded>".into(),
                detail: format!(
                    "checkpoint was trained as {:?}/{}/{} hidden units and cannot resume {:?}/{}/{}",
                    ckpt.config.model,
                    ckpt.config.variant.name(),
                    ckpt.config.hidden_size,
                    cfg.model,
                    cfg.variant.name(),
                    cfg.hidden_size
                ),
            });
        }
        let mut model = ModelState::init(cfg);
        for (name, mat) in model.named_params_mut() {
            *mat = ckpt.weight(&name)?.clone();
        }
        Ok(model)
    }

    pub(crate) fn named_params(&self) -> Vec<(String, &Mat)> {
        match self {
            ModelState::Hbv { param_net, nnr } => {
                let mut out = param_net.named_params();
                if let Some(nnr) = nnr {
                    out.extend(nnr.named_params());
                }
                out
            }
            ModelState::Lstm { net } => net.named_params(),
        }
    }

    pub(crate) fn named_params_mut(&mut self) -> Vec<(String, &mut Mat)> {
        match self {
            ModelState::Hbv { param_net, nnr } => {
                let mut out = param_net.named_params_mut();
                if let Some(nnr) = nnr {
                    out.extend(nnr.named_params_mut());
                }
                out
            }
            ModelState::Lstm { net } => net.named_params_mut(),
        }
    }

    fn snapshot_weights(&self) -> Vec<NamedMat> {
        self.named_params()
            .into_iter()
            .map(|(name, mat)| NamedMat {
                name,
                mat: mat.clone(),
            })
            .collect()
    }
}

/// Fit normalization statistics on the training split only.
pub(crate) fn fit_norm(dataset: &Dataset, cfg: &TrainingConfig) -> Result<NormBundle, TrainError> {
    let lo = dataset
        .index_of(cfg.train_start)
        .ok_or_else(|| TrainError::Config("train_start outside the dataset".into()))?;
    let hi = dataset
        .index_of(cfg.train_end)
        .ok_or_else(|| TrainError::Config("train_end outside the dataset".into()))?;

    let mut precip = Vec::new();
    let mut temp = Vec::new();
    let mut pet = Vec::new();
    for forcing in &dataset.forcings {
        precip.extend_from_slice(&forcing.precip[lo..=hi]);
        temp.extend_from_slice(&forcing.t_mean[lo..=hi]);
        pet.extend_from_slice(&forcing.pet[lo..=hi]);
    }
    let forcing_stats = NormStats::fit(&[precip, temp, pet]);

    let n_attr = crate::data::attribute_count();
    let attr_cols: Vec<Vec<f64>> = (0..n_attr)
        .map(|j| dataset.basins.iter().map(|b| b.attributes[j]).collect())
        .collect();
    let attribute_stats = NormStats::fit(&attr_cols);

    let flow = match cfg.model {
        ModelKind::Hbv => None,
        ModelKind::LstmBenchmark => {
            let mut transformed = Vec::new();
            for obs in &dataset.observations {
                for i in lo..=hi {
                    if obs.mask[i] {
                        transformed.push(flow_transform(obs.flow[i])?);
                    }
                }
            }
            if transformed.is_empty() {
                return Err(TrainError::NoValidObservations { iteration: 0 });
            }
            Some(NormStats::fit(&[transformed]))
        }
    };

    Ok(NormBundle {
        forcing: forcing_stats,
        attributes: attribute_stats,
        flow,
    })
}

pub(crate) fn normalized_attributes(dataset: &Dataset, norm: &NormBundle, basins: &[usize]) -> Mat {
    let n_attr = crate::data::attribute_count();
    Mat::from_fn(basins.len(), n_attr, |r, c| {
        norm.attributes
            .normalize(c, dataset.basins[basins[r]].attributes[c])
    })
}

/// The per-day batch slices used by one iteration.
pub(crate) struct BatchData {
    attrs: Mat,
    /// `warmup + window` entries.
    norm_forcing: Vec<Mat>,
    precip: Vec<Vec<f64>>,
    temp: Vec<Vec<f64>>,
    pet: Vec<Vec<f64>>,
    /// Window-only observations and masks, `[T][B]`.
    obs: Vec<Vec<f64>>,
    mask: Vec<Vec<bool>>,
    basin_ids: Vec<String>,
}

pub(crate) fn assemble_batch(
    dataset: &Dataset,
    cfg: &TrainingConfig,
    norm: &NormBundle,
    batch: &[WindowSample],
) -> BatchData {
    let b = batch.len();
    let total = cfg.warmup_days + cfg.window_days;
    let basins: Vec<usize> = batch.iter().map(|s| s.basin).collect();
    let attrs = normalized_attributes(dataset, norm, &basins);

    let mut norm_forcing = Vec::with_capacity(total);
    let mut precip = Vec::with_capacity(total);
    let mut temp = Vec::with_capacity(total);
    let mut pet = Vec::with_capacity(total);
    for d in 0..total {
        let mut p = Vec::with_capacity(b);
        let mut t = Vec::with_capacity(b);
        let mut e = Vec::with_capacity(b);
        let mut nf = Mat::zeros(b, 3);
        for (row, sample) in batch.iter().enumerate() {
            let axis = sample.start - cfg.warmup_days + d;
            let forcing = &dataset.forcings[sample.basin];
            p.push(forcing.precip[axis]);
            t.push(forcing.t_mean[axis]);
            e.push(forcing.pet[axis]);
            nf.set(row, 0, norm.forcing.normalize(0, forcing.precip[axis]));
            nf.set(row, 1, norm.forcing.normalize(1, forcing.t_mean[axis]));
            nf.set(row, 2, norm.forcing.normalize(2, forcing.pet[axis]));
        }
        norm_forcing.push(nf);
        precip.push(p);
        temp.push(t);
        pet.push(e);
    }

    let mut obs = Vec::with_capacity(cfg.window_days);
    let mut mask = Vec::with_capacity(cfg.window_days);
    for d in 0..cfg.window_days {
        let mut o = Vec::with_capacity(b);
        let mut m = Vec::with_capacity(b);
        for sample in batch {
            let axis = sample.start + d;
            let series = &dataset.observations[sample.basin];
            o.push(series.flow[axis]);
            m.push(series.mask[axis]);
        }
        obs.push(o);
        mask.push(m);
    }

    BatchData {
        attrs,
        norm_forcing,
        precip,
        temp,
        pet,
        obs,
        mask,
        basin_ids: batch
            .iter()
            .map(|s| dataset.basins[s.basin].id.clone())
            .collect(),
    }
}

/// Map one dynamic-output column (unit interval) onto its physical range.
struct DynamicLayout {
    runoff_col: Option<usize>,
    et_col: Option<usize>,
}

impl DynamicLayout {
    fn for_variant(variant: ModelVariant) -> DynamicLayout {
        let mut next = 0;
        let runoff_col = variant.dynamic_runoff_shape().then(|| {
            let c = next;
            next += 1;
            c
        });
        let et_col = variant.dynamic_et_shape().then(|| {
            let _ = &mut next;
            next
        });
        DynamicLayout { runoff_col, et_col }
    }
}

/// The differentiable portion of one iteration: loss variables plus the
/// trainable-leaf handles, in the fixed named-parameter order.
pub(crate) struct TrainGraph {
    pub tape: Tape,
    pub total: Var,
    pub plain: Var,
    pub transformed: Var,
    pub handles: Vec<Var>,
}

/// Build the forward graph for one batch: network warm-up without
/// gradients, window forward, parameter mapping, store warm-up without
/// gradients, window simulation, routing, loss.
pub(crate) fn hbv_window_graph(
    cfg: &TrainingConfig,
    data: &BatchData,
    param_net: &ParamNet,
    nnr: Option<&NnrNet>,
) -> Result<TrainGraph, TrainError> {
    let b = data.basin_ids.len();
    let warmup = cfg.warmup_days;
    let window = cfg.window_days;
    let layout = DynamicLayout::for_variant(cfg.variant);
    let ranges = cfg.param_ranges;

    // No-gradient prefix: settle the network's recurrent state over the
    // warm-up days and read the warm-up dynamic parameters as values.
    let scratch = Tape::new();
    let (net_init, warmup_dynamic) = if warmup > 0 {
        let vars = param_net.leaf(&scratch, false);
        let out = param_net_forward(
            &scratch,
            &vars,
            &data.attrs,
            &data.norm_forcing[..warmup],
            None,
        );
        let dynamic: Vec<Mat> = out
            .dynamic_raw
            .iter()
            .map(|d| scratch.matrix_value(*d))
            .collect();
        (Some(out.final_state), dynamic)
    } else {
        (None, Vec::new())
    };

    // Window pass on the live tape.
    let tape = Tape::new();
    let net_vars = param_net.leaf(&tape, true);
    let forward = param_net_forward(
        &tape,
        &net_vars,
        &data.attrs,
        &data.norm_forcing[warmup..],
        net_init,
    );
    let param_vars = ranges.map_static_outputs(&tape, forward.static_raw);

    // Physical parameter values for the no-gradient warm-up simulation.
    let static_unit = tape.matrix_value(forward.static_raw);
    let static_params: Vec<crate::hbv::StaticParams> = (0..b)
        .map(|row| {
            let unit: Vec<f64> = (0..PARAM_COUNT).map(|c| static_unit.get(row, c)).collect();
            ranges.params_from_unit(&unit)
        })
        .collect();

    let map_dynamic = |tape: &Tape, raw: Var, col: usize, range: crate::hbv::ParamRange| -> Var {
        range.map_var(tape, tape.slice_cols(raw, col, 1))
    };

    // Warm-up water-store spin-up without gradients, using the same
    // parameter values (detached) and the warm-up dynamic parameters.
    let nnr_scratch = nnr.map(|n| n.leaf(&scratch, false));
    let warmup_cfg = StepConfig::new(cfg.variant, nnr_scratch.as_ref())?;
    let scratch_params = ParamVars::constants(&scratch, &static_params);
    let init_states: Vec<HbvState> = static_params.iter().map(HbvState::initial).collect();
    let (window_init, history_flows) = if warmup > 0 {
        let days: Vec<DayInput> = (0..warmup)
            .map(|d| DayInput {
                precip: scratch.matrix(Mat::column(&data.precip[d])),
                temp: scratch.matrix(Mat::column(&data.temp[d])),
                pet: scratch.matrix(Mat::column(&data.pet[d])),
                runoff_shape: layout.runoff_col.map(|c| {
                    map_dynamic(
                        &scratch,
                        scratch.matrix(warmup_dynamic[d].clone()),
                        c,
                        ranges.runoff_shape,
                    )
                }),
                et_shape: layout.et_col.map(|c| {
                    map_dynamic(
                        &scratch,
                        scratch.matrix(warmup_dynamic[d].clone()),
                        c,
                        ranges.et_shape,
                    )
                }),
            })
            .collect();
        let init = StateVars::constants(&scratch, &init_states);
        let rollout = hbv_rollout(&scratch, &days, init, &scratch_params, &warmup_cfg)?;
        let final_states = rollout.final_state.values(&scratch);
        // Antecedent discharge for the routing kernel's reach-back.
        let tail = cfg.routing_days.saturating_sub(1).min(warmup);
        let history: Vec<Mat> = rollout.fluxes[warmup - tail..]
            .iter()
            .map(|f| scratch.matrix_value(f.discharge))
            .collect();
        (final_states, history)
    } else {
        (init_states, Vec::new())
    };

    // Window simulation with gradients.
    let nnr_vars = nnr.map(|n| n.leaf(&tape, true));
    let step_cfg = StepConfig::new(cfg.variant, nnr_vars.as_ref())?;
    let days: Vec<DayInput> = (0..window)
        .map(|d| DayInput {
            precip: tape.matrix(Mat::column(&data.precip[warmup + d])),
            temp: tape.matrix(Mat::column(&data.temp[warmup + d])),
            pet: tape.matrix(Mat::column(&data.pet[warmup + d])),
            runoff_shape: layout
                .runoff_col
                .map(|c| map_dynamic(&tape, forward.dynamic_raw[d], c, ranges.runoff_shape)),
            et_shape: layout
                .et_col
                .map(|c| map_dynamic(&tape, forward.dynamic_raw[d], c, ranges.et_shape)),
        })
        .collect();
    let init = if warmup > 0 {
        StateVars::constants(&tape, &window_init)
    } else {
        // Without a warm-up the start-state soil column tracks the learned
        // field capacity, so its gradient path stays connected.
        let b_zeros = tape.matrix(Mat::zeros(b, 1));
        StateVars {
            snowpack: b_zeros,
            snow_liquid: b_zeros,
            soil_moisture: tape.mul_const(param_vars.field_capacity, 0.5),
            upper_zone: b_zeros,
            lower_zone: tape.matrix(Mat::filled(b, 1, 10.0)),
        }
    };
    let rollout = hbv_rollout(&tape, &days, init, &param_vars, &step_cfg)?;

    // Routing over the window, with the warm-up tail as pre-history.
    let uh = gamma_uh_on_tape(
        &tape,
        param_vars.routing_shape,
        param_vars.routing_scale,
        cfg.routing_days,
    );
    let discharge: Vec<Var> = rollout.fluxes.iter().map(|f| f.discharge).collect();
    let history: Vec<Var> = history_flows
        .iter()
        .map(|m| tape.matrix(m.clone()))
        .collect();
    let routed = route_on_tape(&tape, &discharge, &history, &uh);

    let (total, plain, transformed) =
        composite_loss_on_tape(&tape, &routed, &data.obs, &data.mask, cfg.alpha)?;
    let mut handles = ParamNet::leaf_handles(&net_vars);
    if let Some(nv) = nnr_vars.as_ref() {
        handles.extend(NnrNet::leaf_handles(nv));
    }
    Ok(TrainGraph {
        tape,
        total,
        plain,
        transformed,
        handles,
    })
}

#[allow(clippy::too_many_arguments)]
fn hbv_train_step(
    cfg: &TrainingConfig,
    data: &BatchData,
    param_net: &ParamNet,
    nnr: Option<&NnrNet>,
    optimizer: &mut Optimizer,
    named_params: &mut [(String, &mut Mat)],
) -> Result<LossTerms, TrainError> {
    let graph = hbv_window_graph(cfg, data, param_net, nnr)?;
    let terms = LossTerms {
        total: graph.tape.scalar_value(graph.total),
        plain: graph.tape.scalar_value(graph.plain),
        transformed: graph.tape.scalar_value(graph.transformed),
    };
    if !terms.total.is_finite() {
        return Ok(terms); // caller turns this into a diagnostic error
    }

    let grads_map = graph.tape.backward(graph.total);
    let grads: Vec<Mat> = graph
        .handles
        .iter()
        .zip(named_params.iter())
        .map(|(h, (_, p))| grads_map.grad_matrix(*h, p.rows(), p.cols()))
        .collect();
    optimizer.step(named_params, &grads, cfg.clip_norm)?;
    Ok(terms)
}

fn lstm_inputs(data: &BatchData, day: usize) -> Mat {
    let b = data.attrs.rows();
    let nf = &data.norm_forcing[day];
    Mat::from_fn(b, 3 + data.attrs.cols(), |r, c| {
        if c < 3 {
            nf.get(r, c)
        } else {
            data.attrs.get(r, c - 3)
        }
    })
}

fn lstm_train_step(
    cfg: &TrainingConfig,
    data: &BatchData,
    net: &StreamflowLstm,
    flow_norm: &NormStats,
    optimizer: &mut Optimizer,
    named_params: &mut [(String, &mut Mat)],
) -> Result<LossTerms, TrainError> {
    let warmup = cfg.warmup_days;
    let window = cfg.window_days;

    let init = if warmup > 0 {
        let scratch = Tape::new();
        let vars = net.leaf(&scratch, false);
        let inputs: Vec<Mat> = (0..warmup).map(|d| lstm_inputs(data, d)).collect();
        Some(lstm_streamflow_forward(&scratch, &vars, &inputs, None).final_state)
    } else {
        None
    };

    let tape = Tape::new();
    let vars = net.leaf(&tape, true);
    let inputs: Vec<Mat> = (0..window).map(|d| lstm_inputs(data, warmup + d)).collect();
    let out = lstm_streamflow_forward(&tape, &vars, &inputs, init);

    // Masked RMSE of normalized transformed discharge.
    let mut acc: Option<Var> = None;
    let mut n_valid = 0usize;
    for (d, pred) in out.predictions.iter().enumerate() {
        let targets: Vec<f64> = data.obs[d]
            .iter()
            .zip(&data.mask[d])
            .map(|(&q, &m)| {
                if m {
                    Ok(flow_norm.normalize(0, flow_transform(q)?))
                } else {
                    Ok(0.0)
                }
            })
            .collect::<Result<_, TrainError>>()?;
        let mask_col: Vec<f64> = data.mask[d]
            .iter()
            .map(|&m| if m { 1.0 } else { 0.0 })
            .collect();
        n_valid += data.mask[d].iter().filter(|&&m| m).count();
        let target = tape.matrix(Mat::column(&targets));
        let mask = tape.matrix(Mat::column(&mask_col));
        let diff = tape.sub(*pred, target);
        let sq = tape.mul(tape.mul(diff, diff), mask);
        let day = tape.sum(sq);
        acc = Some(match acc {
            None => day,
            Some(a) => tape.add(a, day),
        });
    }
    if n_valid == 0 {
        return Err(TrainError::NoValidObservations { iteration: 0 });
    }
    let mse = tape.mul_const(acc.unwrap(), 1.0 / n_valid as f64);
    let loss = tape.sqrt(tape.clamp_min(mse, 1e-24));
    let terms = LossTerms {
        total: tape.scalar_value(loss),
        plain: tape.scalar_value(loss),
        transformed: 0.0,
    };
    if !terms.total.is_finite() {
        return Ok(terms);
    }

    let grads_map = tape.backward(loss);
    let handles = StreamflowLstm::leaf_handles(&vars);
    let grads: Vec<Mat> = handles
        .iter()
        .zip(named_params.iter())
        .map(|(h, (_, p))| grads_map.grad_matrix(*h, p.rows(), p.cols()))
        .collect();
    optimizer.step(named_params, &grads, cfg.clip_norm)?;
    Ok(terms)
}

/// Train on the dataset's training period. `resume` continues from a saved
/// checkpoint; `epoch_sink` is called with a snapshot after every epoch
/// (for checkpoint and trace files).
pub fn train(
    dataset: &Dataset,
    cfg: &TrainingConfig,
    resume: Option<Checkpoint>,
    mut epoch_sink: impl FnMut(&Checkpoint) -> Result<(), TrainError>,
) -> Result<TrainOutcome, TrainError> {
    cfg.validate(dataset)?;

    let (mut model, norm, mut optimizer, start_epoch, mut history) = match resume {
        None => {
            let model = ModelState::init(cfg);
            let norm = fit_norm(dataset, cfg)?;
            let named = model.named_params();
            let optimizer = Optimizer::new(cfg.optimizer, cfg.learning_rate, &named);
            (model, norm, optimizer, 0usize, Vec::new())
        }
        Some(ckpt) => {
            let model = ModelState::from_checkpoint(cfg, &ckpt)?;
            let optimizer = match &ckpt.optimizer {
                Some(state) => Optimizer::from_state(state.clone()),
                None => {
                    let named = model.named_params();
                    Optimizer::new(cfg.optimizer, cfg.learning_rate, &named)
                }
            };
            let epoch = ckpt.epoch;
            let history = ckpt.loss_history.clone();
            (model, ckpt.norm, optimizer, epoch, history)
        }
    };

    let iters_per_epoch = cfg.iterations_per_epoch(dataset);
    for epoch in start_epoch..cfg.epochs {
        let mut rng = named_rng(cfg.seed, &format!("sampler/{epoch}"));
        for it in 0..iters_per_epoch {
            let iteration = epoch * iters_per_epoch + it;
            let batch = sample_minibatch(dataset, cfg, &mut rng)?;
            let data = assemble_batch(dataset, cfg, &norm, &batch);
            let terms = {
                let mut named = model_params_split(&mut model);
                match &named.0 {
                    ModelRef::Hbv { param_net, nnr } => hbv_train_step(
                        cfg,
                        &data,
                        param_net,
                        nnr.as_ref(),
                        &mut optimizer,
                        &mut named.1,
                    )?,
                    ModelRef::Lstm { net } => {
                        let flow_norm = norm.flow.as_ref().ok_or_else(|| {
                            TrainError::Config("flow statistics missing for the baseline".into())
                        })?;
                        lstm_train_step(cfg, &data, net, flow_norm, &mut optimizer, &mut named.1)?
                    }
                }
            };
            if !terms.total.is_finite() {
                return Err(TrainError::NonFiniteLoss {
                    iteration,
                    basins: data.basin_ids,
                });
            }
            history.push(LossRow {
                iteration,
                epoch,
                loss: terms.total,
                plain: terms.plain,
                transformed: terms.transformed,
            });
        }
        let snapshot = Checkpoint {
            version: CHECKPOINT_VERSION,
            config: cfg.clone(),
            epoch: epoch + 1,
            seed: cfg.seed,
            norm: norm.clone(),
            vocab: dataset.vocab.clone(),
            weights: model.snapshot_weights(),
            optimizer: Some(optimizer.state()),
            loss_history: history.clone(),
        };
        epoch_sink(&snapshot)?;
        if epoch + 1 == cfg.epochs {
            return Ok(TrainOutcome { checkpoint: snapshot });
        }
    }

    // Resuming a finished run: emit the unchanged snapshot.
    let snapshot = Checkpoint {
        version: CHECKPOINT_VERSION,
        config: cfg.clone(),
        epoch: cfg.epochs,
        seed: cfg.seed,
        norm,
        vocab: dataset.vocab.clone(),
        weights: model.snapshot_weights(),
        optimizer: Some(optimizer.state()),
        loss_history: history,
    };
    Ok(TrainOutcome {
        checkpoint: snapshot,
    })
}

/// Borrow the model immutably for the forward pass while handing the
/// optimizer mutable parameter views.
enum ModelRef {
    Hbv {
        param_net: ParamNet,
        nnr: Option<NnrNet>,
    },
    Lstm {
        net: StreamflowLstm,
    },
}

fn model_params_split(model: &mut ModelState) -> (ModelRef, Vec<(String, &mut Mat)>) {
    // The forward pass reads a clone of the (small) parameter structs; the
    // optimizer mutates the originals afterwards.
    let reference = match model {
        ModelState::Hbv { param_net, nnr } => ModelRef::Hbv {
            param_net: param_net.clone(),
            nnr: nnr.clone(),
        },
        ModelState::Lstm { net } => ModelRef::Lstm { net: net.clone() },
    };
    let named = model.named_params_mut();
    (reference, named)
}
