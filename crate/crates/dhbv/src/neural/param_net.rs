//! The parameterization network: an LSTM that reads basin attributes
//! concatenated with each day's forcings and emits process-model parameters
//! in the unit interval.
//!
//! Static parameters are taken from the head output at the *final* timestep
//! of the sequence; dynamic parameters are read from the head at every
//! timestep. All outputs pass through a sigmoid, so downstream code maps
//! them onto physical ranges.

use rand_chacha::ChaCha8Rng;

use super::linear::{LinearLayer, LinearVars};
use super::lstm::{lstm_step, LstmParams, LstmVars};
use crate::autodiff::{Mat, Tape, Var};

#[derive(Clone, Debug, PartialEq)]
pub struct ParamNetConfig {
    pub attribute_dim: usize,
    pub forcing_dim: usize,
    pub hidden: usize,
    /// Number of static parameter outputs.
    pub static_outputs: usize,
    /// Number of per-day dynamic parameter outputs.
    pub dynamic_outputs: usize,
}

impl ParamNetConfig {
    pub fn input_dim(&self) -> usize {
        self.attribute_dim + self.forcing_dim
    }

    pub fn head_dim(&self) -> usize {
        self.static_outputs + self.dynamic_outputs
    }

    pub fn validate(&self) {
        assert!(self.hidden > 0, "param net hidden size must be positive");
        assert!(self.static_outputs > 0, "param net needs static outputs");
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParamNet {
    pub cfg: ParamNetConfig,
    pub lstm: LstmParams,
    pub head: LinearLayer,
}

impl ParamNet {
    pub fn init(cfg: ParamNetConfig, rng: &mut ChaCha8Rng) -> ParamNet {
        cfg.validate();
        let lstm = LstmParams::init(cfg.hidden, cfg.input_dim(), rng);
        let head = LinearLayer::init(cfg.head_dim(), cfg.hidden, rng);
        ParamNet { cfg, lstm, head }
    }

    pub fn zeros(cfg: ParamNetConfig) -> ParamNet {
        cfg.validate();
        let lstm = LstmParams::zeros(cfg.hidden, cfg.input_dim());
        let head = LinearLayer::zeros(cfg.head_dim(), cfg.hidden);
        ParamNet { cfg, lstm, head }
    }

    /// Parameters in the fixed order used by the optimizer and checkpoints.
    pub fn named_params(&self) -> Vec<(String, &Mat)> {
        vec![
            ("param_net.lstm.input_weights".into(), &self.lstm.input_weights),
            ("param_net.lstm.hidden_weights".into(), &self.lstm.hidden_weights),
            ("param_net.lstm.bias".into(), &self.lstm.bias),
            ("param_net.head.weights".into(), &self.head.weights),
            ("param_net.head.bias".into(), &self.head.bias),
        ]
    }

    pub fn named_params_mut(&mut self) -> Vec<(String, &mut Mat)> {
        vec![
            ("param_net.lstm.input_weights".into(), &mut self.lstm.input_weights),
            ("param_net.lstm.hidden_weights".into(), &mut self.lstm.hidden_weights),
            ("param_net.lstm.bias".into(), &mut self.lstm.bias),
            ("param_net.head.weights".into(), &mut self.head.weights),
            ("param_net.head.bias".into(), &mut self.head.bias),
        ]
    }

    pub fn leaf(&self, tape: &Tape, trainable: bool) -> ParamNetVars {
        ParamNetVars {
            lstm: self.lstm.leaf(tape, trainable),
            head: self.head.leaf(tape, trainable),
            cfg: self.cfg.clone(),
        }
    }

    /// Leaf variables in the same order as [`ParamNet::named_params`], for
    /// gradient extraction.
    pub fn leaf_handles(vars: &ParamNetVars) -> Vec<Var> {
        vec![
            vars.lstm.input_weights,
            vars.lstm.hidden_weights,
            vars.lstm.bias,
            vars.head.weights,
            vars.head.bias,
        ]
    }
}

#[derive(Clone, Debug)]
pub struct ParamNetVars {
    pub lstm: LstmVars,
    pub head: LinearVars,
    pub cfg: ParamNetConfig,
}

/// Outputs of a forward pass over one window.
pub struct ParamNetOutput {
    /// `[B x static_outputs]`, in (0, 1); read from the final timestep.
    pub static_raw: Var,
    /// Per day `[B x dynamic_outputs]`, in (0, 1). Empty when the
    /// configuration has no dynamic outputs.
    pub dynamic_raw: Vec<Var>,
    /// Final hidden and cell values, for chaining a later window.
    pub final_state: (Mat, Mat),
}

/// Run the network over a window of days. `attributes` is `[B x A]`
/// (normalized), `forcings` one `[B x F]` matrix per day (normalized).
/// `init_state` warm-starts the recurrence, e.g. from a no-gradient pass
/// over the warm-up period.
pub fn param_net_forward(
    tape: &Tape,
    vars: &ParamNetVars,
    attributes: &Mat,
    forcings: &[Mat],
    init_state: Option<(Mat, Mat)>,
) -> ParamNetOutput {
    assert!(!forcings.is_empty(), "param_net_forward: empty window");
    let batch = attributes.rows();
    assert_eq!(
        attributes.cols(),
        vars.cfg.attribute_dim,
        "attribute width mismatch"
    );
    assert!(attributes.all_finite(), "param_net_forward: NaN in attributes");

    let hidden = vars.cfg.hidden;
    let (h0, c0) = match init_state {
        Some((h, c)) => {
            assert_eq!(h.shape(), (batch, hidden), "init hidden shape mismatch");
            (tape.matrix(h), tape.matrix(c))
        }
        None => (
            tape.matrix(Mat::zeros(batch, hidden)),
            tape.matrix(Mat::zeros(batch, hidden)),
        ),
    };

    let statics = vars.cfg.static_outputs;
    let dynamics = vars.cfg.dynamic_outputs;
    let mut h = h0;
    let mut c = c0;
    let mut dynamic_raw = Vec::with_capacity(if dynamics > 0 { forcings.len() } else { 0 });
    let mut last_h = h0;
    for day in forcings {
        assert_eq!(day.rows(), batch, "forcing batch mismatch");
        assert_eq!(day.cols(), vars.cfg.forcing_dim, "forcing width mismatch");
        assert!(day.all_finite(), "param_net_forward: NaN in forcings");
        let input = tape.matrix(concat_attrs(day, attributes));
        let (hn, cn) = lstm_step(tape, &vars.lstm, input, h, c);
        h = hn;
        c = cn;
        last_h = h;
        if dynamics > 0 {
            let head_out = vars.head.forward(tape, h);
            dynamic_raw.push(tape.sigmoid(tape.slice_cols(head_out, statics, dynamics)));
        }
    }
    let final_head = vars.head.forward(tape, last_h);
    let static_raw = tape.sigmoid(tape.slice_cols(final_head, 0, statics));
    ParamNetOutput {
        static_raw,
        dynamic_raw,
        final_state: (tape.matrix_value(h), tape.matrix_value(c)),
    }
}

/// Values-only outputs of a no-gradient pass.
pub struct ParamNetValues {
    pub static_unit: Mat,
    pub dynamic_unit: Vec<Mat>,
    pub final_state: (Mat, Mat),
}

/// Run the network without keeping gradients: the sequence is processed in
/// segments on throwaway tapes so memory stays bounded on long records.
pub fn param_net_forward_values(
    net: &ParamNet,
    attributes: &Mat,
    forcings: &[Mat],
    init_state: Option<(Mat, Mat)>,
    segment_days: usize,
) -> ParamNetValues {
    assert!(!forcings.is_empty(), "param_net_forward_values: empty window");
    let segment_days = segment_days.max(1);
    let mut state = init_state;
    let mut dynamic_unit = Vec::new();
    let mut static_unit = None;
    for chunk in forcings.chunks(segment_days) {
        let tape = Tape::new();
        let vars = net.leaf(&tape, false);
        let out = param_net_forward(&tape, &vars, attributes, chunk, state.take());
        for d in &out.dynamic_raw {
            dynamic_unit.push(tape.matrix_value(*d));
        }
        static_unit = Some(tape.matrix_value(out.static_raw));
        state = Some(out.final_state);
    }
    let final_state = state.expect("at least one segment ran");
    ParamNetValues {
        static_unit: static_unit.expect("at least one segment ran"),
        dynamic_unit,
        final_state,
    }
}

fn concat_attrs(day: &Mat, attributes: &Mat) -> Mat {
    let rows = day.rows();
    let fdim = day.cols();
    Mat::from_fn(rows, fdim + attributes.cols(), |r, c| {
        if c < fdim {
            day.get(r, c)
        } else {
            attributes.get(r, c - fdim)
        }
    })
}
