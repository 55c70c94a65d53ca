//! Streamflow and baseflow metrics.

use super::EvalError;

/// Nash-Sutcliffe efficiency over masked pairs: one minus the error
/// variance over the observation variance. 1 is perfect; 0 matches the
/// long-term mean.
pub fn nse(sim: &[f64], obs: &[f64], mask: &[bool]) -> Result<f64, EvalError> {
    assert_eq!(sim.len(), obs.len(), "nse: series lengths differ");
    assert_eq!(sim.len(), mask.len(), "nse: mask length differs");
    let pairs: Vec<(f64, f64)> = sim
        .iter()
        .zip(obs)
        .zip(mask)
        .filter(|(_, &m)| m)
        .map(|((s, o), _)| (*s, *o))
        .collect();
    if pairs.len() < 2 {
        return Err(EvalError::TooFewObservations {
            needed: 2,
            got: pairs.len(),
        });
    }
    let mean_obs = pairs.iter().map(|(_, o)| o).sum::<f64>() / pairs.len() as f64;
    let var: f64 = pairs.iter().map(|(_, o)| (o - mean_obs).powi(2)).sum();
    if var == 0.0 {
        return Err(EvalError::ZeroVariance);
    }
    let err: f64 = pairs.iter().map(|(s, o)| (s - o).powi(2)).sum();
    Ok(1.0 - err / var)
}

/// Root-mean-square error over masked pairs.
pub fn rmse(sim: &[f64], obs: &[f64], mask: &[bool]) -> Result<f64, EvalError> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for ((s, o), &m) in sim.iter().zip(obs).zip(mask) {
        if m {
            sum += (s - o) * (s - o);
            n += 1;
        }
    }
    if n == 0 {
        return Err(EvalError::TooFewObservations { needed: 1, got: 0 });
    }
    Ok((sum / n as f64).sqrt())
}

/// Pearson correlation.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, EvalError> {
    assert_eq!(xs.len(), ys.len(), "pearson: lengths differ");
    if xs.len() < 2 {
        return Err(EvalError::TooFewObservations {
            needed: 2,
            got: xs.len(),
        });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        cov += (x - mx) * (y - my);
        vx += (x - mx) * (x - mx);
        vy += (y - my) * (y - my);
    }
    if vx == 0.0 || vy == 0.0 {
        return Err(EvalError::ZeroVariance);
    }
    Ok(cov / (vx * vy).sqrt())
}

/// Masked Pearson correlation of two flow series.
pub fn flow_correlation(sim: &[f64], obs: &[f64], mask: &[bool]) -> Result<f64, EvalError> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for ((s, o), &m) in sim.iter().zip(obs).zip(mask) {
        if m {
            xs.push(*s);
            ys.push(*o);
        }
    }
    pearson(&xs, &ys)
}

/// Long-term baseflow index: total baseflow over total discharge, both
/// summed before routing.
pub fn bfi_sim(baseflow: &[f64], discharge: &[f64]) -> Result<f64, EvalError> {
    assert_eq!(baseflow.len(), discharge.len(), "bfi: lengths differ");
    let q: f64 = discharge.iter().sum();
    if q <= 0.0 {
        return Err(EvalError::ZeroDischarge);
    }
    Ok(baseflow.iter().sum::<f64>() / q)
}

/// Pearson correlation of simulated versus reference baseflow index across
/// basins; pairs with a missing side are skipped.
pub fn bfi_spatial_correlation(
    sim: &[Option<f64>],
    reference: &[Option<f64>],
) -> Result<f64, EvalError> {
    assert_eq!(sim.len(), reference.len(), "bfi correlation: lengths differ");
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (s, r) in sim.iter().zip(reference) {
        if let (Some(s), Some(r)) = (s, r) {
            xs.push(*s);
            ys.push(*r);
        }
    }
    if xs.len() < 3 {
        return Err(EvalError::TooFewBasins {
            needed: 3,
            got: xs.len(),
        });
    }
    pearson(&xs, &ys)
}
