use rand::RngExt;
use rand_chacha::ChaCha8Rng;

use crate::autodiff::{Mat, Tape, Var};

/// Fully connected layer: weights `[out x in]`, bias `[out]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearLayer {
    /// `[out x in]`
    pub weights: Mat,
    /// Stored as a `[1 x out]` row so it broadcasts over the batch.
    pub bias: Mat,
}

/// Uniform init in `±1/sqrt(fan_in)`, drawn row-major.
pub(crate) fn uniform_init(rows: usize, cols: usize, fan_in: usize, rng: &mut ChaCha8Rng) -> Mat {
    let bound = 1.0 / (fan_in as f64).sqrt();
    Mat::from_fn(rows, cols, |_, _| rng.random_range(-bound..bound))
}

impl LinearLayer {
    pub fn init(out_dim: usize, in_dim: usize, rng: &mut ChaCha8Rng) -> LinearLayer {
        LinearLayer {
            weights: uniform_init(out_dim, in_dim, in_dim, rng),
            bias: uniform_init(1, out_dim, in_dim, rng),
        }
    }

    pub fn zeros(out_dim: usize, in_dim: usize) -> LinearLayer {
        LinearLayer {
            weights: Mat::zeros(out_dim, in_dim),
            bias: Mat::zeros(1, out_dim),
        }
    }

    pub fn out_dim(&self) -> usize {
        self.weights.rows()
    }

    pub fn in_dim(&self) -> usize {
        self.weights.cols()
    }

    /// Register the layer's parameters on a tape. Trainable registration
    /// yields leaves that receive gradients; otherwise they are constants.
    pub fn leaf(&self, tape: &Tape, trainable: bool) -> LinearVars {
        let (weights, bias) = if trainable {
            (
                tape.matrix_var(self.weights.clone()),
                tape.matrix_var(self.bias.clone()),
            )
        } else {
            (tape.matrix(self.weights.clone()), tape.matrix(self.bias.clone()))
        };
        LinearVars {
            weights,
            weights_t: tape.transpose(weights),
            bias,
        }
    }
}

/// Tape handles for one registered [`LinearLayer`].
#[derive(Clone, Copy, Debug)]
pub struct LinearVars {
    pub weights: Var,
    /// Cached transpose so batched forwards are `x [B x in] . W^T [in x out]`.
    pub weights_t: Var,
    pub bias: Var,
}

impl LinearVars {
    /// `x [B x in] -> [B x out]`.
    pub fn forward(&self, tape: &Tape, x: Var) -> Var {
        tape.add(tape.matmul(x, self.weights_t), self.bias)
    }
}
