use rand_chacha::ChaCha8Rng;

use super::linear::uniform_init;
use crate::autodiff::{Mat, Tape, Var};

/// LSTM cell parameters with the gate order (input, forget, cell, output)
/// packed along the first axis.
#[derive(Clone, Debug, PartialEq)]
pub struct LstmParams {
    /// `[4H x I]`
    pub input_weights: Mat,
    /// `[4H x H]`
    pub hidden_weights: Mat,
    /// `[1 x 4H]`
    pub bias: Mat,
    pub hidden: usize,
    pub input: usize,
}

impl LstmParams {
    pub fn init(hidden: usize, input: usize, rng: &mut ChaCha8Rng) -> LstmParams {
        assert!(hidden > 0 && input > 0, "LSTM dimensions must be positive");
        LstmParams {
            input_weights: uniform_init(4 * hidden, input, input, rng),
            hidden_weights: uniform_init(4 * hidden, hidden, hidden, rng),
            bias: uniform_init(1, 4 * hidden, hidden, rng),
            hidden,
            input,
        }
    }

    pub fn zeros(hidden: usize, input: usize) -> LstmParams {
        LstmParams {
            input_weights: Mat::zeros(4 * hidden, input),
            hidden_weights: Mat::zeros(4 * hidden, hidden),
            bias: Mat::zeros(1, 4 * hidden),
            hidden,
            input,
        }
    }

    pub fn leaf(&self, tape: &Tape, trainable: bool) -> LstmVars {
        let reg = |m: &Mat| {
            if trainable {
                tape.matrix_var(m.clone())
            } else {
                tape.matrix(m.clone())
            }
        };
        let input_weights = reg(&self.input_weights);
        let hidden_weights = reg(&self.hidden_weights);
        LstmVars {
            input_weights,
            hidden_weights,
            input_weights_t: tape.transpose(input_weights),
            hidden_weights_t: tape.transpose(hidden_weights),
            bias: reg(&self.bias),
            hidden: self.hidden,
            input: self.input,
        }
    }
}

/// Tape handles for one registered [`LstmParams`].
#[derive(Clone, Copy, Debug)]
pub struct LstmVars {
    pub input_weights: Var,
    pub hidden_weights: Var,
    pub input_weights_t: Var,
    pub hidden_weights_t: Var,
    pub bias: Var,
    pub hidden: usize,
    pub input: usize,
}

/// One cell update over a batch: `x [B x I]`, `h`/`c` `[B x H]`.
///
/// `i = sigmoid, f = sigmoid, g = tanh, o = sigmoid`; `c' = f*c + i*g`;
/// `h' = o * tanh(c')`.
pub fn lstm_step(tape: &Tape, vars: &LstmVars, x: Var, h: Var, c: Var) -> (Var, Var) {
    let hdim = vars.hidden;
    let pre = tape.add(
        tape.add(
            tape.matmul(x, vars.input_weights_t),
            tape.matmul(h, vars.hidden_weights_t),
        ),
        vars.bias,
    );
    let input_gate = tape.sigmoid(tape.slice_cols(pre, 0, hdim));
    let forget_gate = tape.sigmoid(tape.slice_cols(pre, hdim, hdim));
    let candidate = tape.tanh(tape.slice_cols(pre, 2 * hdim, hdim));
    let output_gate = tape.sigmoid(tape.slice_cols(pre, 3 * hdim, hdim));
    let c_next = tape.add(tape.mul(forget_gate, c), tape.mul(input_gate, candidate));
    let h_next = tape.mul(output_gate, tape.tanh(c_next));
    (h_next, c_next)
}

/// Run the cell over a sequence; returns every hidden state plus the final
/// `(h, c)` pair. Panics on an empty sequence.
pub fn lstm_forward(
    tape: &Tape,
    vars: &LstmVars,
    xs: &[Var],
    h0: Var,
    c0: Var,
) -> (Vec<Var>, (Var, Var)) {
    assert!(!xs.is_empty(), "lstm_forward: empty input sequence");
    let mut h = h0;
    let mut c = c0;
    let mut hs = Vec::with_capacity(xs.len());
    for &x in xs {
        let (hn, cn) = lstm_step(tape, vars, x, h, c);
        h = hn;
        c = cn;
        hs.push(h);
    }
    (hs, (h, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::{check_gradients, Value};
    use rand::{RngExt, SeedableRng};

    fn sigmoid(x: f64) -> f64 {
        1.0 / (1.0 + (-x).exp())
    }

    /// Direct-formula single-sample oracle, independent of the tape.
    fn step_oracle(p: &LstmParams, x: &[f64], h: &[f64], c: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let hd = p.hidden;
        let mut pre = vec![0.0; 4 * hd];
        for (r, pr) in pre.iter_mut().enumerate() {
            let mut acc = p.bias.get(0, r);
            for (k, xv) in x.iter().enumerate() {
                acc += p.input_weights.get(r, k) * xv;
            }
            for (k, hv) in h.iter().enumerate() {
                acc += p.hidden_weights.get(r, k) * hv;
            }
            *pr = acc;
        }
        let mut h_next = vec![0.0; hd];
        let mut c_next = vec![0.0; hd];
        for j in 0..hd {
            let i = sigmoid(pre[j]);
            let f = sigmoid(pre[hd + j]);
            let g = pre[2 * hd + j].tanh();
            let o = sigmoid(pre[3 * hd + j]);
            c_next[j] = f * c[j] + i * g;
            h_next[j] = o * c_next[j].tanh();
        }
        (h_next, c_next)
    }

    fn run_step(p: &LstmParams, x: &[f64], h: &[f64], c: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let tape = Tape::new();
        let vars = p.leaf(&tape, false);
        let xv = tape.matrix(Mat::row(x));
        let hv = tape.matrix(Mat::row(h));
        let cv = tape.matrix(Mat::row(c));
        let (hn, cn) = lstm_step(&tape, &vars, xv, hv, cv);
        (
            tape.matrix_value(hn).data().to_vec(),
            tape.matrix_value(cn).data().to_vec(),
        )
    }

    #[test]
    fn zero_weights_zero_cell_gives_zero() {
        let p = LstmParams::zeros(3, 2);
        let (h, c) = run_step(&p, &[0.7, -0.3], &[0.0; 3], &[0.0; 3]);
        assert!(h.iter().all(|&v| v == 0.0));
        assert!(c.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_weights_unit_cell() {
        // With all weights zero, c' = 0.5 * 1 = 0.5, h' = 0.5 * tanh(0.5).
        let p = LstmParams::zeros(1, 1);
        let (h, c) = run_step(&p, &[2.0], &[0.0], &[1.0]);
        assert!((c[0] - 0.5).abs() < 1e-15);
        assert!((h[0] - 0.5 * 0.5_f64.tanh()).abs() < 1e-15);
        assert!((h[0] - 0.231_058_578_630_004_87).abs() < 1e-12);
    }

    #[test]
    fn random_step_matches_direct_formula_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let p = LstmParams::init(2, 2, &mut rng);
            let draw = |rng: &mut ChaCha8Rng| {
                (0..2).map(|_| rng.random_range(-1.5..1.5)).collect::<Vec<f64>>()
            };
            let (x, h, c) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
            let (h_tape, c_tape) = run_step(&p, &x, &h, &c);
            let (h_ref, c_ref) = step_oracle(&p, &x, &h, &c);
            for (a, b) in h_tape.iter().zip(&h_ref) {
                assert!((a - b).abs() < 1e-12);
            }
            for (a, b) in c_tape.iter().zip(&c_ref) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn forward_is_stepwise_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = LstmParams::init(3, 2, &mut rng);
        let xs_data: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..2).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();

        let tape = Tape::new();
        let vars = p.leaf(&tape, false);
        let xs: Vec<Var> = xs_data.iter().map(|x| tape.matrix(Mat::row(x))).collect();
        let h0 = tape.matrix(Mat::zeros(1, 3));
        let c0 = tape.matrix(Mat::zeros(1, 3));
        let (hs, _) = lstm_forward(&tape, &vars, &xs, h0, c0);
        assert_eq!(hs.len(), 3);

        let mut h = vec![0.0; 3];
        let mut c = vec![0.0; 3];
        for (t, x) in xs_data.iter().enumerate() {
            let (hn, cn) = step_oracle(&p, x, &h, &c);
            h = hn;
            c = cn;
            let got = tape.matrix_value(hs[t]);
            for (a, b) in got.data().iter().zip(&h) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_input_zero_weights_gives_zero_sequence() {
        let p = LstmParams::zeros(2, 1);
        let tape = Tape::new();
        let vars = p.leaf(&tape, false);
        let xs: Vec<Var> = (0..4).map(|_| tape.matrix(Mat::row(&[3.3]))).collect();
        let h0 = tape.matrix(Mat::zeros(1, 2));
        let c0 = tape.matrix(Mat::zeros(1, 2));
        let (hs, _) = lstm_forward(&tape, &vars, &xs, h0, c0);
        for h in hs {
            assert!(tape.matrix_value(h).data().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    #[should_panic(expected = "empty input sequence")]
    fn forward_rejects_empty_sequence() {
        let p = LstmParams::zeros(2, 1);
        let tape = Tape::new();
        let vars = p.leaf(&tape, false);
        let h0 = tape.matrix(Mat::zeros(1, 2));
        let c0 = tape.matrix(Mat::zeros(1, 2));
        let _ = lstm_forward(&tape, &vars, &[], h0, c0);
    }

    #[test]
    fn weight_gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = LstmParams::init(2, 2, &mut rng);
        let xs: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..2).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();

        let f = move |tape: &Tape, vars: &[Var]| {
            let lv = LstmVars {
                input_weights: vars[0],
                hidden_weights: vars[1],
                input_weights_t: tape.transpose(vars[0]),
                hidden_weights_t: tape.transpose(vars[1]),
                bias: vars[2],
                hidden: 2,
                input: 2,
            };
            let x_vars: Vec<Var> = xs.iter().map(|x| tape.matrix(Mat::row(x))).collect();
            let h0 = tape.matrix(Mat::zeros(1, 2));
            let c0 = tape.matrix(Mat::zeros(1, 2));
            let (hs, _) = lstm_forward(tape, &lv, &x_vars, h0, c0);
            tape.sum(*hs.last().unwrap())
        };
        let report = check_gradients(
            f,
            &[
                Value::Matrix(p.input_weights.clone()),
                Value::Matrix(p.hidden_weights.clone()),
                Value::Matrix(p.bias.clone()),
            ],
            1e-6,
        );
        assert!(report.passes(1e-4), "rel err {}", report.max_rel_err);
    }
}
