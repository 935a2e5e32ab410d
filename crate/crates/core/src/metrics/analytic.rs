use crate::error::{Error, Result};
use crate::model::DistributionSpec;
use crate::numeric::{hurwitz_tail, zeta};

/// Closed-form CDF, quantile and integrated CDF of a reference law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticCdf {
    law: DistributionSpec,
}

impl AnalyticCdf {
    pub fn new(law: DistributionSpec) -> Result<Self> {
        law.validate()?;
        Ok(AnalyticCdf { law })
    }

    pub fn law(&self) -> &DistributionSpec {
        &self.law
    }

    pub fn mean(&self) -> Result<f64> {
        self.law.mean()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self.law {
            DistributionSpec::Constant { value } => (x >= value) as u8 as f64,
            DistributionSpec::Uniform { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            DistributionSpec::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            DistributionSpec::Poisson { mean } => {
                if x < 0.0 {
                    return 0.0;
                }
                poisson_terms(mean, x.floor() as u64).map(|(_, p)| p).sum::<f64>().min(1.0)
            }
            DistributionSpec::Zeta { s } => {
                if x < 1.0 {
                    0.0
                } else {
                    zeta_cdf(s, x.floor())
                }
            }
            DistributionSpec::Bernoulli { p } => {
                if x < 0.0 {
                    0.0
                } else if x < 1.0 {
                    1.0 - p
                } else {
                    1.0
                }
            }
        }
    }

    /// `inf { x : F(x) >= u }` for `u` in `(0, 1)`; `u = 1` gives the supremum of the support.
    pub fn quantile(&self, u: f64) -> f64 {
        match self.law {
            DistributionSpec::Constant { value } => value,
            DistributionSpec::Uniform { a, b } => a + u * (b - a),
            DistributionSpec::Exponential { rate } => -(-u).ln_1p() / rate,
            DistributionSpec::Bernoulli { p } => {
                if u <= 1.0 - p {
                    0.0
                } else {
                    1.0
                }
            }
            DistributionSpec::Poisson { .. } | DistributionSpec::Zeta { .. } => {
                if u >= 1.0 {
                    return f64::INFINITY;
                }
                self.integer_quantile(u)
            }
        }
    }

    fn integer_quantile(&self, u: f64) -> f64 {
        // exponential search then bisection on the integer support
        let mut hi = 1.0;
        while self.cdf(hi) < u {
            hi *= 2.0;
        }
        let mut lo = -1.0;
        while hi - lo > 1.0 {
            let mid = ((lo + hi) / 2.0).floor();
            if self.cdf(mid) >= u {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// `Phi(x) = integral_{-inf}^x F(t) dt = E[(x - X)^+]`.
    pub fn integrated_cdf(&self, x: f64) -> f64 {
        match self.law {
            DistributionSpec::Constant { value } => (x - value).max(0.0),
            DistributionSpec::Uniform { a, b } => {
                if x <= a {
                    0.0
                } else if x < b {
                    (x - a) * (x - a) / (2.0 * (b - a))
                } else {
                    0.5 * (b - a) + (x - b)
                }
            }
            DistributionSpec::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    x + (-rate * x).exp_m1() / rate
                }
            }
            DistributionSpec::Poisson { mean } => {
                if x < 0.0 {
                    return 0.0;
                }
                poisson_terms(mean, x.floor() as u64).map(|(j, p)| p * (x - j as f64)).sum()
            }
            DistributionSpec::Zeta { s } => {
                if x < 1.0 {
                    return 0.0;
                }
                let n = x.floor();
                // sum_{j <= n} j p_j; finite only when the mean is (s > 2)
                let first_moment = if s > 2.0 {
                    (zeta(s - 1.0) - hurwitz_tail(s - 1.0, n as u64 + 1)) / zeta(s)
                } else {
                    (1..=n as u64).map(|j| (j as f64).powf(1.0 - s)).sum::<f64>() / zeta(s)
                };
                x * zeta_cdf(s, n) - first_moment
            }
            DistributionSpec::Bernoulli { p } => {
                if x < 0.0 {
                    0.0
                } else if x < 1.0 {
                    (1.0 - p) * x
                } else {
                    x - p
                }
            }
        }
    }

    pub(crate) fn require_finite_mean(&self) -> Result<f64> {
        self.mean().map_err(|_| {
            Error::UnsupportedMoment(format!("reference law {} has infinite mean", self.law))
        })
    }
}

fn zeta_cdf(s: f64, n: f64) -> f64 {
    1.0 - hurwitz_tail(s, n as u64 + 1) / zeta(s)
}

/// `(j, P(X = j))` for `j = 0..=upto`.
fn poisson_terms(mean: f64, upto: u64) -> impl Iterator<Item = (u64, f64)> {
    let ln_mean = if mean > 0.0 { mean.ln() } else { f64::NEG_INFINITY };
    (0..=upto).map(move |j| {
        let p = if mean == 0.0 {
            (j == 0) as u8 as f64
        } else {
            let jf = j as f64;
            (jf * ln_mean - mean - libm::lgamma(jf + 1.0)).exp()
        };
        (j, p)
    })
}
