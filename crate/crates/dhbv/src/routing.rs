//! Gamma-density unit-hydrograph routing.
//!
//! Instantaneous basin runoff is convolved with a discretized gamma density
//! to produce gauged streamflow. The kernel is evaluated at day midpoints
//! `i + 0.5` and renormalized to sum to one, so routing conserves mass
//! exactly. Both a plain `f64` path and a tape path are provided; the tape
//! path is differentiable in the shape and scale parameters through
//! `lgamma`.

use crate::autodiff::{lgamma, Tape, Var};

/// Default kernel support in days; covers daily basin-scale recessions for
/// the configured scale-parameter range.
pub const DEFAULT_UH_DAYS: usize = 15;

/// Causal convolution kernel: `weights[i]` applies to runoff `i` days
/// earlier. Non-negative, sums to one.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitHydrograph {
    weights: Vec<f64>,
}

impl UnitHydrograph {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Identity kernel `[1, 0, ...]`.
    pub fn delta(len: usize) -> UnitHydrograph {
        assert!(len >= 1);
        let mut weights = vec![0.0; len];
        weights[0] = 1.0;
        UnitHydrograph { weights }
    }

    /// Build from explicit weights; they must be non-negative and sum to
    /// one within 1e-9.
    pub fn from_weights(weights: Vec<f64>) -> UnitHydrograph {
        assert!(!weights.is_empty(), "unit hydrograph must not be empty");
        assert!(
            weights.iter().all(|&w| w >= 0.0),
            "unit hydrograph weights must be non-negative"
        );
        let total: f64 = weights.iter().sum();
        assert!(
            (total - 1.0).abs() <= 1e-9,
            "unit hydrograph weights must sum to 1, got {total}"
        );
        UnitHydrograph { weights }
    }
}

/// Discretized gamma-density kernel with shape `shape` and scale
/// `scale_days`, evaluated at midpoints and renormalized.
///
/// Panics if either parameter is not strictly positive or `t_max` is zero.
pub fn gamma_uh(shape: f64, scale_days: f64, t_max: usize) -> UnitHydrograph {
    assert!(
        shape > 0.0 && scale_days > 0.0,
        "gamma_uh: parameters must be positive, got shape {shape}, scale {scale_days}"
    );
    assert!(t_max >= 1, "gamma_uh: kernel needs at least one day");
    let log_norm = lgamma(shape) + shape * scale_days.ln();
    let raw: Vec<f64> = (0..t_max)
        .map(|i| {
            let t = i as f64 + 0.5;
            ((shape - 1.0) * t.ln() - t / scale_days - log_norm).exp()
        })
        .collect();
    let total: f64 = raw.iter().sum();
    UnitHydrograph {
        weights: raw.iter().map(|w| w / total).collect(),
    }
}

/// Tape version of [`gamma_uh`]: one kernel weight per day, differentiable
/// in `shape` and `scale`. The parameter variables may be per-basin column
/// vectors, in which case each weight is a column vector too.
pub fn gamma_uh_on_tape(tape: &Tape, shape: Var, scale: Var, t_max: usize) -> Vec<Var> {
    assert!(t_max >= 1, "gamma_uh: kernel needs at least one day");
    let log_norm = tape.add(tape.lgamma(shape), tape.mul(shape, tape.ln(scale)));
    let shifted = tape.add_const(shape, -1.0);
    let raw: Vec<Var> = (0..t_max)
        .map(|i| {
            let t = i as f64 + 0.5;
            let decay = tape.div(tape.scalar(t), scale);
            let log_w = tape.sub(tape.sub(tape.mul_const(shifted, t.ln()), decay), log_norm);
            tape.exp(log_w)
        })
        .collect();
    let mut total = raw[0];
    for w in &raw[1..] {
        total = tape.add(total, *w);
    }
    raw.iter().map(|w| tape.div(*w, total)).collect()
}

/// Convolve runoff with the kernel: `routed[t] = Σ_i w[i] · runoff[t − i]`
/// with zero-padded pre-history.
pub fn route(runoff: &[f64], uh: &UnitHydrograph) -> Vec<f64> {
    assert!(!runoff.is_empty(), "route: empty runoff series");
    let w = &uh.weights;
    (0..runoff.len())
        .map(|t| {
            let reach = t.min(w.len() - 1);
            (0..=reach).map(|i| w[i] * runoff[t - i]).sum()
        })
        .collect()
}

/// Tape version of [`route`] over per-day runoff variables. `history` may
/// hold the most recent pre-window runoff (latest last) so the early window
/// days see real antecedent flow instead of the zero pad.
pub fn route_on_tape(tape: &Tape, runoff: &[Var], history: &[Var], uh_weights: &[Var]) -> Vec<Var> {
    assert!(!runoff.is_empty(), "route: empty runoff series");
    let t_max = uh_weights.len();
    (0..runoff.len())
        .map(|t| {
            let mut acc: Option<Var> = None;
            for (i, w) in uh_weights.iter().enumerate().take(t_max) {
                let source = if i <= t {
                    Some(runoff[t - i])
                } else {
                    // 1-based steps back into pre-window history.
                    let back = i - t;
                    if back <= history.len() {
                        Some(history[history.len() - back])
                    } else {
                        None
                    }
                };
                if let Some(s) = source {
                    let term = tape.mul(*w, s);
                    acc = Some(match acc {
                        None => term,
                        Some(a) => tape.add(a, term),
                    });
                }
            }
            acc.expect("t_max >= 1 guarantees at least one term")
        })
        .collect()
}
