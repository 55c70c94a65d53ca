//! Central-finite-difference gradient verification.
//!
//! Ships as a regular (non-test) utility so gradients of any tape program
//! can be audited from diagnostics code or a debugger, not only from the
//! test suite.

use super::{Tape, Value, Var};

/// One input slot compared against its finite-difference estimate.
#[derive(Clone, Debug)]
pub struct GradCheckEntry {
    /// Which input value the slot belongs to.
    pub input: usize,
    /// Flat element offset within that input (0 for scalars).
    pub element: usize,
    pub analytic: f64,
    pub numeric: f64,
    pub rel_err: f64,
}

#[derive(Clone, Debug)]
pub struct GradCheckReport {
    pub entries: Vec<GradCheckEntry>,
    pub max_rel_err: f64,
}

impl GradCheckReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_rel_err < tol
    }

    pub fn worst(&self) -> Option<&GradCheckEntry> {
        self.entries
            .iter()
            .max_by(|a, b| a.rel_err.total_cmp(&b.rel_err))
    }
}

fn perturbed(inputs: &[Value], input: usize, element: usize, delta: f64) -> Vec<Value> {
    let mut out = inputs.to_vec();
    match &mut out[input] {
        Value::Scalar(v) => *v += delta,
        Value::Matrix(m) => m.data_mut()[element] += delta,
    }
    out
}

/// Compare reverse-mode gradients of `f` against central finite differences
/// `(f(x+h) - f(x-h)) / 2h` for every element of every input. Inputs are
/// registered as differentiable leaves in the order given.
///
/// Relative error is `|analytic - numeric| / (|numeric| + 1e-8)`.
pub fn check_gradients<F>(f: F, inputs: &[Value], step: f64) -> GradCheckReport
where
    F: Fn(&Tape, &[Var]) -> Var,
{
    // Analytic pass.
    let tape = Tape::new();
    let vars: Vec<Var> = inputs
        .iter()
        .map(|v| match v {
            Value::Scalar(s) => tape.scalar_var(*s),
            Value::Matrix(m) => tape.matrix_var(m.clone()),
        })
        .collect();
    let out = f(&tape, &vars);
    let grads = tape.backward(out);

    let value_of = |vals: &[Value]| -> f64 {
        let t = Tape::new();
        let vs: Vec<Var> = vals
            .iter()
            .map(|v| match v {
                Value::Scalar(s) => t.scalar_var(*s),
                Value::Matrix(m) => t.matrix_var(m.clone()),
            })
            .collect();
        let o = f(&t, &vs);
        t.scalar_value(o)
    };

    let mut entries = Vec::new();
    for (i, input) in inputs.iter().enumerate() {
        let n = match input {
            Value::Scalar(_) => 1,
            Value::Matrix(m) => m.len(),
        };
        for e in 0..n {
            let analytic = match grads.grad(vars[i]) {
                Some(Value::Scalar(g)) => *g,
                Some(Value::Matrix(g)) => g.data()[e],
                None => 0.0,
            };
            let plus = value_of(&perturbed(inputs, i, e, step));
            let minus = value_of(&perturbed(inputs, i, e, -step));
            let numeric = (plus - minus) / (2.0 * step);
            let rel_err = (analytic - numeric).abs() / (numeric.abs() + 1e-8);
            entries.push(GradCheckEntry {
                input: i,
                element: e,
                analytic,
                numeric,
                rel_err,
            });
        }
    }
    let max_rel_err = entries.iter().map(|e| e.rel_err).fold(0.0, f64::max);
    GradCheckReport {
        entries,
        max_rel_err,
    }
}

/// Convenience wrapper for purely scalar inputs.
pub fn check_scalar_gradients<F>(f: F, x0: &[f64], step: f64) -> GradCheckReport
where
    F: Fn(&Tape, &[Var]) -> Var,
{
    let inputs: Vec<Value> = x0.iter().map(|&v| Value::Scalar(v)).collect();
    check_gradients(f, &inputs, step)
}
