//! Purely data-driven LSTM streamflow baseline: forcings and attributes in,
//! one transformed-and-normalized discharge value per day out.

use rand_chacha::ChaCha8Rng;

use super::linear::{LinearLayer, LinearVars};
use super::lstm::{lstm_step, LstmParams, LstmVars};
use crate::autodiff::{Mat, Tape, Var};

#[derive(Clone, Debug, PartialEq)]
pub struct StreamflowLstm {
    pub lstm: LstmParams,
    pub head: LinearLayer,
}

impl StreamflowLstm {
    pub fn init(hidden: usize, input_dim: usize, rng: &mut ChaCha8Rng) -> StreamflowLstm {
        StreamflowLstm {
            lstm: LstmParams::init(hidden, input_dim, rng),
            head: LinearLayer::init(1, hidden, rng),
        }
    }

    pub fn named_params(&self) -> Vec<(String, &Mat)> {
        vec![
            ("streamflow_lstm.lstm.input_weights".into(), &self.lstm.input_weights),
            ("streamflow_lstm.lstm.hidden_weights".into(), &self.lstm.hidden_weights),
            ("streamflow_lstm.lstm.bias".into(), &self.lstm.bias),
            ("streamflow_lstm.head.weights".into(), &self.head.weights),
            ("streamflow_lstm.head.bias".into(), &self.head.bias),
        ]
    }

    pub fn named_params_mut(&mut self) -> Vec<(String, &mut Mat)> {
        vec![
            ("streamflow_lstm.lstm.input_weights".into(), &mut self.lstm.input_weights),
            ("streamflow_lstm.lstm.hidden_weights".into(), &mut self.lstm.hidden_weights),
            ("streamflow_lstm.lstm.bias".into(), &mut self.lstm.bias),
            ("streamflow_lstm.head.weights".into(), &mut self.head.weights),
            ("streamflow_lstm.head.bias".into(), &mut self.head.bias),
        ]
    }

    pub fn leaf(&self, tape: &Tape, trainable: bool) -> StreamflowLstmVars {
        StreamflowLstmVars {
            lstm: self.lstm.leaf(tape, trainable),
            head: self.head.leaf(tape, trainable),
        }
    }

    pub fn leaf_handles(vars: &StreamflowLstmVars) -> Vec<Var> {
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
pub struct StreamflowLstmVars {
    pub lstm: LstmVars,
    pub head: LinearVars,
}

pub struct StreamflowOutput {
    /// One `[B x 1]` prediction per day, in transformed-normalized units.
    pub predictions: Vec<Var>,
    pub final_state: (Mat, Mat),
}

/// Run over a window of `[B x input_dim]` day matrices (normalized inputs).
pub fn lstm_streamflow_forward(
    tape: &Tape,
    vars: &StreamflowLstmVars,
    inputs: &[Mat],
    init_state: Option<(Mat, Mat)>,
) -> StreamflowOutput {
    assert!(!inputs.is_empty(), "lstm_streamflow_forward: empty window");
    let batch = inputs[0].rows();
    let hidden = vars.lstm.hidden;
    let (mut h, mut c) = match init_state {
        Some((h0, c0)) => (tape.matrix(h0), tape.matrix(c0)),
        None => (
            tape.matrix(Mat::zeros(batch, hidden)),
            tape.matrix(Mat::zeros(batch, hidden)),
        ),
    };
    let mut predictions = Vec::with_capacity(inputs.len());
    for day in inputs {
        assert!(day.all_finite(), "lstm_streamflow_forward: NaN in inputs");
        let x = tape.matrix(day.clone());
        let (hn, cn) = lstm_step(tape, &vars.lstm, x, h, c);
        h = hn;
        c = cn;
        predictions.push(vars.head.forward(tape, h));
    }
    StreamflowOutput {
        predictions,
        final_state: (tape.matrix_value(h), tape.matrix_value(c)),
    }
}

/// Values-only forward in bounded-memory segments.
pub fn lstm_streamflow_forward_values(
    net: &StreamflowLstm,
    inputs: &[Mat],
    init_state: Option<(Mat, Mat)>,
    segment_days: usize,
) -> (Vec<Mat>, (Mat, Mat)) {
    assert!(
        !inputs.is_empty(),
        "lstm_streamflow_forward_values: empty window"
    );
    let segment_days = segment_days.max(1);
    let mut state = init_state;
    let mut predictions = Vec::with_capacity(inputs.len());
    for chunk in inputs.chunks(segment_days) {
        let tape = Tape::new();
        let vars = net.leaf(&tape, false);
        let out = lstm_streamflow_forward(&tape, &vars, chunk, state.take());
        for p in &out.predictions {
            predictions.push(tape.matrix_value(*p));
        }
        state = Some(out.final_state);
    }
    (predictions, state.expect("at least one segment ran"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::{check_gradients, Value};
    use rand::SeedableRng;

    #[test]
    fn zero_weights_output_head_bias() {
        let mut net = StreamflowLstm {
            lstm: LstmParams::zeros(4, 3),
            head: LinearLayer::zeros(1, 4),
        };
        net.head.bias.set(0, 0, 0.77);
        let tape = Tape::new();
        let vars = net.leaf(&tape, false);
        let days: Vec<Mat> = (0..5).map(|d| Mat::filled(2, 3, d as f64)).collect();
        let out = lstm_streamflow_forward(&tape, &vars, &days, None);
        assert_eq!(out.predictions.len(), 5);
        for p in out.predictions {
            let m = tape.matrix_value(p);
            assert_eq!(m.shape(), (2, 1));
            assert!(m.data().iter().all(|&v| (v - 0.77).abs() < 1e-15));
        }
    }

    #[test]
    fn end_to_end_gradient_check_small_sequence() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let net = StreamflowLstm::init(2, 3, &mut rng);
        let days: Vec<Mat> = (0..10)
            .map(|d| Mat::from_fn(1, 3, |_, c| 0.2 * ((d + c) as f64).sin()))
            .collect();
        let inputs: Vec<Value> = net
            .named_params()
            .iter()
            .map(|(_, m)| Value::Matrix((*m).clone()))
            .collect();
        let f = move |tape: &Tape, vars: &[Var]| {
            let sv = StreamflowLstmVars {
                lstm: LstmVars {
                    input_weights: vars[0],
                    hidden_weights: vars[1],
                    input_weights_t: tape.transpose(vars[0]),
                    hidden_weights_t: tape.transpose(vars[1]),
                    bias: vars[2],
                    hidden: 2,
                    input: 3,
                },
                head: LinearVars {
                    weights: vars[3],
                    weights_t: tape.transpose(vars[3]),
                    bias: vars[4],
                },
            };
            let out = lstm_streamflow_forward(tape, &sv, &days, None);
            let mut acc = tape.sum(out.predictions[0]);
            for p in &out.predictions[1..] {
                // Square so every day contributes curvature.
                let sq = tape.mul(*p, *p);
                acc = tape.add(acc, tape.sum(sq));
            }
            acc
        };
        let report = check_gradients(f, &inputs, 1e-6);
        assert!(report.passes(1e-4), "rel err {}", report.max_rel_err);
    }
}
