//! Log-gamma and digamma for the gamma-density routing kernel.
//!
//! `lgamma` uses the Lanczos approximation (g = 7, 9 coefficients) with the
//! reflection formula below 0.5; `digamma` uses the upward recurrence into
//! the asymptotic series. Both are accurate to well under 1e-10 over the
//! argument range the routing kernel can produce (roughly 0.05 to 50).

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
// Published coefficient table, kept digit-for-digit.
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// Natural log of the gamma function for `x > 0`.
pub fn lgamma(x: f64) -> f64 {
    assert!(x > 0.0, "lgamma: argument must be positive, got {x}");
    if x < 0.5 {
        // Reflection: ln Γ(x) = ln(π / sin(πx)) − ln Γ(1 − x); sin(πx) > 0 here.
        (PI / (PI * x).sin()).ln() - lgamma(1.0 - x)
    } else {
        let z = x - 1.0;
        let mut series = LANCZOS_COEF[0];
        for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
            series += c / (z + i as f64);
        }
        let t = z + LANCZOS_G + 0.5;
        0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + series.ln()
    }
}

/// Derivative of `lgamma`: the digamma function, for `x > 0`.
pub fn digamma(x: f64) -> f64 {
    assert!(x > 0.0, "digamma: argument must be positive, got {x}");
    let mut x = x;
    let mut result = 0.0;
    // Recurrence ψ(x) = ψ(x + 1) − 1/x until the asymptotic series is safe.
    while x < 6.0 {
        result -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // ψ(x) ~ ln x − 1/(2x) − Σ B_{2n} / (2n x^{2n})
    result += x.ln() - 0.5 * inv
        - inv2
            * (1.0 / 12.0
                - inv2
                    * (1.0 / 120.0
                        - inv2
                            * (1.0 / 252.0
                                - inv2
                                    * (1.0 / 240.0
                                        - inv2 * (1.0 / 132.0 - inv2 * 691.0 / 32760.0)))));
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    const EULER_MASCHERONI: f64 = 0.577_215_664_901_532_9;

    #[test]
    fn lgamma_exact_points() {
        assert!(lgamma(1.0).abs() < 1e-14);
        assert!(lgamma(2.0).abs() < 1e-14);
        // Γ(0.5) = √π
        assert!((lgamma(0.5) - PI.sqrt().ln()).abs() < 1e-13);
        // Γ(5) = 24, Γ(10) = 362880, Γ(20) = 19!
        assert!((lgamma(5.0) - 24f64.ln()).abs() < 1e-13);
        assert!((lgamma(10.0) - 362880f64.ln()).abs() < 1e-12);
        assert!((lgamma(20.0) - 121_645_100_408_832_000f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn lgamma_recurrence_over_range() {
        // ln Γ(x + 1) − ln Γ(x) = ln x pins consistency across [0.05, 50].
        let mut x = 0.05;
        while x < 50.0 {
            let lhs = lgamma(x + 1.0) - lgamma(x);
            assert!(
                (lhs - x.ln()).abs() < 1e-10,
                "recurrence residual {} at x = {x}",
                (lhs - x.ln()).abs()
            );
            x += 0.173;
        }
    }

    #[test]
    fn lgamma_reflection() {
        let mut x = 0.06;
        while x < 1.0 {
            let lhs = lgamma(x) + lgamma(1.0 - x);
            let rhs = (PI / (PI * x).sin()).ln();
            assert!((lhs - rhs).abs() < 1e-11, "reflection residual at x = {x}");
            x += 0.07;
        }
    }

    #[test]
    fn lgamma_duplication() {
        // Γ(2x) = Γ(x) Γ(x + 1/2) 2^(2x−1) / √π
        let mut x = 0.3;
        while x < 25.0 {
            let lhs = lgamma(2.0 * x);
            let rhs = lgamma(x) + lgamma(x + 0.5) + (2.0 * x - 1.0) * 2f64.ln()
                - 0.5 * PI.ln();
            assert!((lhs - rhs).abs() < 1e-10, "duplication residual at x = {x}");
            x += 0.311;
        }
    }

    #[test]
    fn digamma_known_values() {
        assert!((digamma(1.0) + EULER_MASCHERONI).abs() < 1e-12);
        assert!((digamma(0.5) + EULER_MASCHERONI + 2.0 * 2f64.ln()).abs() < 1e-12);
        assert!((digamma(2.0) - (1.0 - EULER_MASCHERONI)).abs() < 1e-12);
    }

    #[test]
    fn digamma_matches_lgamma_slope() {
        // Central finite difference of lgamma as the oracle.
        let h = 1e-6;
        for &x in &[0.05, 0.2, 0.7, 1.0, 1.5, 3.0, 7.7, 20.0, 49.0] {
            let fd = (lgamma(x + h) - lgamma(x - h)) / (2.0 * h);
            let rel = (digamma(x) - fd).abs() / (fd.abs() + 1e-8);
            assert!(rel < 1e-7, "digamma vs finite difference at x = {x}: {rel}");
        }
    }

    #[test]
    #[should_panic(expected = "must be positive")]
    fn lgamma_rejects_nonpositive() {
        let _ = lgamma(0.0);
    }
}
