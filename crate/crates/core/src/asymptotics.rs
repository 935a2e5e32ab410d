//! Tail asymptotics of `R^(k)` when the offspring count is regularly varying:
//!
//! ```text
//! P(R^(k) > x) ~ (E[C] E[Q])^a / (1 - rho_1)^a * sum_{j=0}^k rho_a^j (1 - rho_1^(k-j))^a * P(N > x)
//! ```
//!
//! Used as a reference overlay for tail plots, never as a pass/fail gate.

use crate::error::{Error, Result};
use crate::model::DistributionSpec;
use crate::numeric::{hurwitz_tail, zeta};

/// The prefactor multiplying `P(N > x)` for depth `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailAsymptotic {
    pub alpha: f64,
    pub coefficient: f64,
    pub k: usize,
}

/// Inputs of the tail prefactor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailInputs {
    pub mean_c: f64,
    pub mean_q: f64,
    pub rho_1: f64,
    pub rho_alpha: f64,
    pub alpha: f64,
}

pub fn tail_coefficient(inputs: &TailInputs, k: usize) -> Result<f64> {
    let TailInputs { mean_c, mean_q, rho_1, rho_alpha, alpha } = *inputs;
    if !(rho_1 < 1.0) {
        return Err(Error::invalid("rho_1", format!("must be < 1, got {rho_1}")));
    }
    if !(alpha > 0.0) {
        return Err(Error::invalid("alpha", format!("must be > 0, got {alpha}")));
    }
    if !(rho_alpha >= 0.0) {
        return Err(Error::invalid("rho_alpha", format!("must be >= 0, got {rho_alpha}")));
    }
    let prefactor = ((mean_c * mean_q).abs() / (1.0 - rho_1)).powf(alpha);
    let sum: f64 = (0..=k)
        .map(|j| rho_alpha.powi(j as i32) * (1.0 - rho_1.powi((k - j) as i32)).powf(alpha))
        .sum();
    Ok(prefactor * sum)
}

impl TailAsymptotic {
    pub fn new(inputs: &TailInputs, k: usize) -> Result<Self> {
        Ok(TailAsymptotic { alpha: inputs.alpha, coefficient: tail_coefficient(inputs, k)?, k })
    }

    /// A curve with a given prefactor, e.g. a published constant.
    pub fn with_coefficient(alpha: f64, coefficient: f64, k: usize) -> Result<Self> {
        if !(coefficient >= 0.0 && coefficient.is_finite()) {
            return Err(Error::invalid("coefficient", format!("must be finite and >= 0, got {coefficient}")));
        }
        Ok(TailAsymptotic { alpha, coefficient, k })
    }
}

/// `P(N > x)` for `N` with mass proportional to `j^(-s)` on `{1, 2, ...}`.
pub fn zeta_tail(s: f64, x: f64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::invalid("s", format!("must be > 1, got {s}")));
    }
    if !(x >= 0.0) {
        return Err(Error::invalid("x", format!("must be >= 0, got {x}")));
    }
    if x < 1.0 {
        return Ok(1.0);
    }
    let first = x.floor() + 1.0;
    if first >= u64::MAX as f64 {
        return Ok(0.0);
    }
    Ok(hurwitz_tail(s, first as u64) / zeta(s))
}

/// `G_k(x) = coefficient * P(N > x)` for a zeta offspring law.
pub fn g_k(x: f64, tail: &TailAsymptotic, n_law: &DistributionSpec) -> Result<f64> {
    match *n_law {
        DistributionSpec::Zeta { s } => Ok(tail.coefficient * zeta_tail(s, x)?),
        other => Err(Error::invalid(
            "model.n",
            format!("tail asymptotic needs a regularly varying (zeta) offspring law, got {other}"),
        )),
    }
}

/// `(x, G_k(x))` at integer `x` in `[from, to]`.
pub fn g_k_curve(tail: &TailAsymptotic, n_law: &DistributionSpec, from: u64, to: u64) -> Result<Vec<(f64, f64)>> {
    (from..=to).map(|x| g_k(x as f64, tail, n_law).map(|g| (x as f64, g))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn printed_inputs() -> TailInputs {
        TailInputs { mean_c: 0.25, mean_q: 1.0, rho_1: 0.49, rho_alpha: 0.07, alpha: 2.5 }
    }

    /// Straight evaluation of the printed expression, term by term.
    fn printed_sum_oracle() -> f64 {
        let mut sum = 0.0;
        for j in 0..=10 {
            let a = 0.07f64.powf(j as f64);
            let b = (1.0 - 0.49f64.powf((10 - j) as f64)).powf(2.5);
            sum += a * b;
        }
        0.25f64.powf(2.5) / (1.0 - 0.49f64).powf(2.5) * sum
    }

    #[test]
    fn printed_substitution() {
        let c = tail_coefficient(&printed_inputs(), 10).unwrap();
        assert!((c - printed_sum_oracle()).abs() < 1e-14);
        // direct evaluation of the printed sum gives about 0.1806, not 0.365
        assert!((c - 0.1806).abs() < 1e-3, "{c}");
    }

    #[test]
    fn coefficient_edge_cases() {
        assert_eq!(tail_coefficient(&printed_inputs(), 0).unwrap(), 0.0);
        let mut bad = printed_inputs();
        bad.rho_1 = 1.0;
        assert!(tail_coefficient(&bad, 10).is_err());
        let mut prev = 0.0;
        for k in 0..30 {
            let c = tail_coefficient(&printed_inputs(), k).unwrap();
            assert!(c >= prev);
            prev = c;
        }
    }

    #[test]
    fn zeta_tail_values() {
        assert_eq!(zeta_tail(2.5, 0.0).unwrap(), 1.0);
        assert!((zeta_tail(2.5, 1.0).unwrap() - (1.0 - 1.0 / zeta(2.5))).abs() < 1e-15);
        assert!((zeta_tail(2.5, 1.0).unwrap() - 0.25455).abs() < 1e-5);
        let mut prev = 1.0;
        for x in 0..200 {
            let t = zeta_tail(2.5, x as f64 * 0.7).unwrap();
            assert!(t <= prev);
            prev = t;
        }
        assert!(zeta_tail(2.5, 1e300).unwrap() == 0.0);
    }

    #[test]
    fn zeta_tail_regular_variation() {
        let s = 2.5;
        let limit = 1.0 / ((s - 1.0) * zeta(s));
        for x in [1e3, 1e4] {
            let scaled = zeta_tail(s, x).unwrap() * x.powf(s - 1.0);
            assert!((scaled / limit - 1.0).abs() < 0.01, "x={x}: {scaled} vs {limit}");
        }
    }

    #[test]
    fn g_k_values() {
        let n = DistributionSpec::Zeta { s: 2.5 };
        let t = TailAsymptotic::with_coefficient(2.5, 0.365, 10).unwrap();
        assert!((g_k(1.0, &t, &n).unwrap() - 0.09291).abs() < 1e-5);
        assert_eq!(g_k(0.0, &t, &n).unwrap(), 0.365);
        let zero = TailAsymptotic::with_coefficient(2.5, 0.0, 10).unwrap();
        assert_eq!(g_k(17.0, &zero, &n).unwrap(), 0.0);
        assert!(g_k(1.0, &t, &DistributionSpec::Poisson { mean: 3.0 }).is_err());
        let curve = g_k_curve(&t, &n, 0, 50).unwrap();
        assert!(curve.windows(2).all(|w| w[1].1 <= w[0].1 && w[0].1 <= 0.365));
    }
}
