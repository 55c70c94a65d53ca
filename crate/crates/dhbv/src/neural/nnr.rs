//! Effective-rainfall replacement network.
//!
//! A small MLP maps (field capacity, runoff-shape parameter, soil moisture,
//! saturation ratio, incoming water) to a gate in (0, 1); effective rainfall
//! is `gate * incoming water`, so it can never exceed the water actually
//! available and the step's mass ledger is preserved.

use rand_chacha::ChaCha8Rng;

use super::linear::{LinearLayer, LinearVars};
use crate::autodiff::{Mat, Tape, Var};

pub const NNR_INPUT_DIM: usize = 5;

/// Fixed input scalings that bring the five inputs to order one before the
/// MLP; constants, so they do not change the learnable relation.
const INPUT_SCALE: [f64; NNR_INPUT_DIM] = [1e-3, 1.0 / 6.0, 1e-3, 1.0, 1e-2];

#[derive(Clone, Debug, PartialEq)]
pub struct NnrConfig {
    /// Hidden layer widths; the input width is fixed at 5 and the output is
    /// a single gate.
    pub hidden: Vec<usize>,
}

impl Default for NnrConfig {
    fn default() -> Self {
        NnrConfig { hidden: vec![16, 16] }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NnrNet {
    pub cfg: NnrConfig,
    pub layers: Vec<LinearLayer>,
}

impl NnrNet {
    pub fn init(cfg: NnrConfig, rng: &mut ChaCha8Rng) -> NnrNet {
        let mut dims = vec![NNR_INPUT_DIM];
        dims.extend_from_slice(&cfg.hidden);
        dims.push(1);
        let layers = dims
            .windows(2)
            .map(|w| LinearLayer::init(w[1], w[0], rng))
            .collect();
        NnrNet { cfg, layers }
    }

    pub fn zeros(cfg: NnrConfig) -> NnrNet {
        let mut dims = vec![NNR_INPUT_DIM];
        dims.extend_from_slice(&cfg.hidden);
        dims.push(1);
        let layers = dims
            .windows(2)
            .map(|w| LinearLayer::zeros(w[1], w[0]))
            .collect();
        NnrNet { cfg, layers }
    }

    pub fn named_params(&self) -> Vec<(String, &Mat)> {
        let mut out = Vec::new();
        for (i, layer) in self.layers.iter().enumerate() {
            out.push((format!("nnr.layer{i}.weights"), &layer.weights));
            out.push((format!("nnr.layer{i}.bias"), &layer.bias));
        }
        out
    }

    pub fn named_params_mut(&mut self) -> Vec<(String, &mut Mat)> {
        let mut out = Vec::new();
        for (i, layer) in self.layers.iter_mut().enumerate() {
            out.push((format!("nnr.layer{i}.weights"), &mut layer.weights));
            out.push((format!("nnr.layer{i}.bias"), &mut layer.bias));
        }
        out
    }

    pub fn leaf(&self, tape: &Tape, trainable: bool) -> NnrVars {
        NnrVars {
            layers: self.layers.iter().map(|l| l.leaf(tape, trainable)).collect(),
        }
    }

    pub fn leaf_handles(vars: &NnrVars) -> Vec<Var> {
        let mut out = Vec::new();
        for l in &vars.layers {
            out.push(l.weights);
            out.push(l.bias);
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct NnrVars {
    pub layers: Vec<LinearVars>,
}

/// Gate the incoming water: all five inputs are `[B x 1]` columns on the
/// tape. Returns effective rainfall in `[0, water_in]`.
///
/// Panics if any incoming-water value is negative.
pub fn nnr_forward(
    tape: &Tape,
    vars: &NnrVars,
    field_capacity: Var,
    runoff_shape: Var,
    soil_moisture: Var,
    saturation_ratio: Var,
    water_in: Var,
) -> Var {
    match tape.value(water_in) {
        crate::autodiff::Value::Scalar(v) => {
            assert!(v >= 0.0, "nnr_forward: negative incoming water {v}")
        }
        crate::autodiff::Value::Matrix(m) => assert!(
            m.data().iter().all(|&v| v >= 0.0),
            "nnr_forward: negative incoming water"
        ),
    }
    let inputs = [
        field_capacity,
        runoff_shape,
        soil_moisture,
        saturation_ratio,
        water_in,
    ];
    let scaled: Vec<Var> = inputs
        .iter()
        .zip(INPUT_SCALE)
        .map(|(v, s)| tape.mul_const(*v, s))
        .collect();
    let mut x = tape.concat_cols(&scaled);
    let last = vars.layers.len() - 1;
    for (i, layer) in vars.layers.iter().enumerate() {
        x = layer.forward(tape, x);
        if i < last {
            x = tape.tanh(x);
        }
    }
    let gate = tape.sigmoid(x);
    tape.mul(gate, water_in)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::{check_gradients, Value};
    use rand::SeedableRng;

    fn forward_plain(net: &NnrNet, fc: f64, beta: f64, ss: f64, ratio: f64, win: f64) -> f64 {
        let tape = Tape::new();
        let vars = net.leaf(&tape, false);
        let col = |v: f64| tape.matrix(Mat::column(&[v]));
        let out = nnr_forward(
            &tape,
            &vars,
            col(fc),
            col(beta),
            col(ss),
            col(ratio),
            col(win),
        );
        tape.matrix_value(out).get(0, 0)
    }

    #[test]
    fn zero_water_means_zero_effective_rainfall() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let net = NnrNet::init(NnrConfig::default(), &mut rng);
        assert_eq!(forward_plain(&net, 250.0, 2.0, 120.0, 0.48, 0.0), 0.0);
    }

    #[test]
    fn zero_weights_pass_half_the_water() {
        let net = NnrNet::zeros(NnrConfig::default());
        let out = forward_plain(&net, 250.0, 2.0, 120.0, 0.48, 8.0);
        assert!((out - 4.0).abs() < 1e-15);
    }

    #[test]
    fn gate_keeps_output_within_water_in() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for seed in 0..10 {
            let net = NnrNet::init(NnrConfig { hidden: vec![8] }, &mut rng);
            let win = 3.0 + seed as f64;
            let out = forward_plain(&net, 400.0, 3.0, 200.0, 0.5, win);
            assert!(out >= 0.0 && out <= win);
        }
    }

    #[test]
    #[should_panic(expected = "negative incoming water")]
    fn rejects_negative_water() {
        let net = NnrNet::zeros(NnrConfig::default());
        let _ = forward_plain(&net, 250.0, 2.0, 120.0, 0.48, -1.0);
    }

    #[test]
    fn weight_gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let net = NnrNet::init(NnrConfig { hidden: vec![6] }, &mut rng);
        let shapes: Vec<Value> = net
            .named_params()
            .iter()
            .map(|(_, m)| Value::Matrix((*m).clone()))
            .collect();
        let f = move |tape: &Tape, vars: &[Var]| {
            let lv = NnrVars {
                layers: vec![
                    LinearVars {
                        weights: vars[0],
                        weights_t: tape.transpose(vars[0]),
                        bias: vars[1],
                    },
                    LinearVars {
                        weights: vars[2],
                        weights_t: tape.transpose(vars[2]),
                        bias: vars[3],
                    },
                ],
            };
            let col = |v: f64| tape.matrix(Mat::column(&[v, v * 0.7]));
            let out = nnr_forward(
                tape,
                &lv,
                col(260.0),
                col(2.4),
                col(130.0),
                col(0.5),
                col(9.0),
            );
            tape.sum(out)
        };
        let report = check_gradients(f, &shapes, 1e-6);
        assert!(report.passes(1e-4), "rel err {}", report.max_rel_err);
    }
}
