//! The composite loss: a weighted sum of the pooled RMSE of discharge and
//! the pooled RMSE of transformed discharge, masked entries excluded from
//! both the sums and the denominators.

use crate::autodiff::{Mat, Tape, Var};
use crate::data::flow_transform;

use super::TrainError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossTerms {
    pub total: f64,
    pub plain: f64,
    pub transformed: f64,
}

/// Plain-value loss over `[B x T]` matrices; `mask` entries are 1 for valid
/// observations and 0 otherwise.
pub fn compute_loss(
    sim: &Mat,
    obs: &Mat,
    mask: &Mat,
    alpha: f64,
) -> Result<LossTerms, TrainError> {
    assert_eq!(sim.shape(), obs.shape(), "loss: shape mismatch");
    assert_eq!(sim.shape(), mask.shape(), "loss: mask shape mismatch");
    let mut n = 0usize;
    let mut plain_sq = 0.0;
    let mut trans_sq = 0.0;
    for i in 0..sim.len() {
        if mask.data()[i] == 0.0 {
            continue;
        }
        let s = sim.data()[i];
        let o = obs.data()[i];
        n += 1;
        plain_sq += (s - o) * (s - o);
        let ts = flow_transform(s)?;
        let to = flow_transform(o)?;
        trans_sq += (ts - to) * (ts - to);
    }
    if n == 0 {
        return Err(TrainError::NoValidObservations { iteration: 0 });
    }
    let plain = (plain_sq / n as f64).sqrt();
    let transformed = (trans_sq / n as f64).sqrt();
    Ok(LossTerms {
        total: (1.0 - alpha) * plain + alpha * transformed,
        plain,
        transformed,
    })
}

/// Tape version over per-day `[B x 1]` discharge columns. Observations and
/// masks are constants. The transform's square root is floored at 1e-8 and
/// each mean square at 1e-24 so gradients stay finite at exact zeros; both
/// floors are far below hydrologic magnitudes.
///
/// Returns `(total, plain, transformed)` variables.
pub fn composite_loss_on_tape(
    tape: &Tape,
    sim_days: &[Var],
    obs_days: &[Vec<f64>],
    mask_days: &[Vec<bool>],
    alpha: f64,
) -> Result<(Var, Var, Var), TrainError> {
    assert_eq!(sim_days.len(), obs_days.len(), "loss: day count mismatch");
    assert_eq!(sim_days.len(), mask_days.len(), "loss: mask count mismatch");
    let mut n_valid = 0usize;
    let mut plain_acc: Option<Var> = None;
    let mut trans_acc: Option<Var> = None;
    for ((sim, obs), mask) in sim_days.iter().zip(obs_days).zip(mask_days) {
        n_valid += mask.iter().filter(|&&m| m).count();
        let mask_col: Vec<f64> = mask.iter().map(|&m| if m { 1.0 } else { 0.0 }).collect();
        let mask_var = tape.matrix(Mat::column(&mask_col));
        let obs_var = tape.matrix(Mat::column(obs));

        let diff = tape.sub(*sim, obs_var);
        let sq = tape.mul(tape.mul(diff, diff), mask_var);
        let day_plain = tape.sum(sq);
        plain_acc = Some(match plain_acc {
            None => day_plain,
            Some(acc) => tape.add(acc, day_plain),
        });

        let trans_obs: Vec<f64> = obs
            .iter()
            .zip(mask)
            .map(|(&o, &m)| if m { flow_transform(o) } else { Ok(0.0) })
            .collect::<Result<_, _>>()?;
        let trans_obs_var = tape.matrix(Mat::column(&trans_obs));
        let safe = tape.clamp_min(*sim, 1e-8);
        let trans_sim = tape.log10(tape.add_const(tape.sqrt(safe), 0.1));
        let tdiff = tape.sub(trans_sim, trans_obs_var);
        let tsq = tape.mul(tape.mul(tdiff, tdiff), mask_var);
        let day_trans = tape.sum(tsq);
        trans_acc = Some(match trans_acc {
            None => day_trans,
            Some(acc) => tape.add(acc, day_trans),
        });
    }
    if n_valid == 0 {
        return Err(TrainError::NoValidObservations { iteration: 0 });
    }
    let scale = 1.0 / n_valid as f64;
    let floor = |x: Var| tape.clamp_min(x, 1e-24);
    let plain = tape.sqrt(floor(tape.mul_const(plain_acc.unwrap(), scale)));
    let transformed = tape.sqrt(floor(tape.mul_const(trans_acc.unwrap(), scale)));
    let total = tape.add(
        tape.mul_const(plain, 1.0 - alpha),
        tape.mul_const(transformed, alpha),
    );
    Ok((total, plain, transformed))
}
