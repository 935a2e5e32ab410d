//! The generic branching vector `(Q, N, C_1, C_2, ...)`: component laws,
//! samplers, analytic moments and the moment-condition checker.

use std::fmt;

use rand::Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::numeric::{integrate, zeta, KahanSum};
use crate::rng::{unit, unit_open_closed};

/// Absolute tolerance for the exact-arithmetic equalities in the critical case.
pub const CRITICAL_CASE_TOLERANCE: f64 = 1e-12;

/// Parametric law of a scalar component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionSpec {
    Constant { value: f64 },
    Uniform { a: f64, b: f64 },
    Exponential { rate: f64 },
    Poisson { mean: f64 },
    /// Mass proportional to `k^(-s)` on `{1, 2, ...}`.
    Zeta { s: f64 },
    Bernoulli { p: f64 },
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            DistributionSpec::Constant { value } => write!(f, "constant({value})"),
            DistributionSpec::Uniform { a, b } => write!(f, "uniform({a},{b})"),
            DistributionSpec::Exponential { rate } => write!(f, "exponential({rate})"),
            DistributionSpec::Poisson { mean } => write!(f, "poisson({mean})"),
            DistributionSpec::Zeta { s } => write!(f, "zeta({s})"),
            DistributionSpec::Bernoulli { p } => write!(f, "bernoulli({p})"),
        }
    }
}

impl DistributionSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            DistributionSpec::Constant { .. } => "constant",
            DistributionSpec::Uniform { .. } => "uniform",
            DistributionSpec::Exponential { .. } => "exponential",
            DistributionSpec::Poisson { .. } => "poisson",
            DistributionSpec::Zeta { .. } => "zeta",
            DistributionSpec::Bernoulli { .. } => "bernoulli",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DistributionSpec::Constant { value } if !value.is_finite() => {
                Err(Error::invalid("constant.value", "must be finite"))
            }
            DistributionSpec::Uniform { a, b } if !(a.is_finite() && b.is_finite() && a < b) => {
                Err(Error::invalid("uniform", format!("requires finite a < b, got a={a}, b={b}")))
            }
            DistributionSpec::Exponential { rate } if !(rate > 0.0 && rate.is_finite()) => {
                Err(Error::invalid("exponential.rate", format!("must be > 0, got {rate}")))
            }
            DistributionSpec::Poisson { mean } if !(mean >= 0.0 && mean.is_finite()) => {
                Err(Error::invalid("poisson.mean", format!("must be >= 0, got {mean}")))
            }
            DistributionSpec::Zeta { s } if !(s > 1.0 && s.is_finite()) => {
                Err(Error::invalid("zeta.s", format!("must be > 1, got {s}")))
            }
            DistributionSpec::Bernoulli { p } if !(0.0..=1.0).contains(&p) => {
                Err(Error::invalid("bernoulli.p", format!("must lie in [0, 1], got {p}")))
            }
            _ => Ok(()),
        }
    }

    /// Whether the law is admissible for the offspring count `N`.
    pub fn is_integer_valued(&self) -> bool {
        match *self {
            DistributionSpec::Poisson { .. }
            | DistributionSpec::Zeta { .. }
            | DistributionSpec::Bernoulli { .. } => true,
            DistributionSpec::Constant { value } => value >= 0.0 && value.fract() == 0.0,
            _ => false,
        }
    }

    fn is_nonnegative(&self) -> bool {
        match *self {
            DistributionSpec::Constant { value } => value >= 0.0,
            DistributionSpec::Uniform { a, .. } => a >= 0.0,
            _ => true,
        }
    }

    pub fn mean(&self) -> Result<f64> {
        Ok(match *self {
            DistributionSpec::Constant { value } => value,
            DistributionSpec::Uniform { a, b } => 0.5 * (a + b),
            DistributionSpec::Exponential { rate } => 1.0 / rate,
            DistributionSpec::Poisson { mean } => mean,
            DistributionSpec::Zeta { s } => {
                if s <= 2.0 {
                    return Err(Error::UnsupportedMoment(format!("zeta({s}) has infinite mean")));
                }
                zeta(s - 1.0) / zeta(s)
            }
            DistributionSpec::Bernoulli { p } => p,
        })
    }

    /// `E[|X|^beta]` for `beta > 0`.
    pub fn abs_moment(&self, beta: f64) -> Result<f64> {
        if !(beta > 0.0) {
            return Err(Error::invalid("beta", format!("must be > 0, got {beta}")));
        }
        Ok(match *self {
            DistributionSpec::Constant { value } => value.abs().powf(beta),
            DistributionSpec::Uniform { a, b } => {
                let e = beta + 1.0;
                let mass = if a >= 0.0 {
                    b.powf(e) - a.powf(e)
                } else if b <= 0.0 {
                    (-a).powf(e) - (-b).powf(e)
                } else {
                    (-a).powf(e) + b.powf(e)
                };
                mass / (e * (b - a))
            }
            DistributionSpec::Exponential { rate } => libm::tgamma(beta + 1.0) / rate.powf(beta),
            DistributionSpec::Poisson { mean } => poisson_moment(mean, beta),
            DistributionSpec::Zeta { s } => {
                if s - beta <= 1.0 {
                    return Err(Error::UnsupportedMoment(format!(
                        "E[N^{beta}] is infinite for zeta({s})"
                    )));
                }
                zeta(s - beta) / zeta(s)
            }
            DistributionSpec::Bernoulli { p } => p,
        })
    }

    /// `E[X^beta]`. Defined for nonnegative laws, for integer `beta`, and for `beta = 1`.
    pub fn raw_moment(&self, beta: f64) -> Result<f64> {
        if beta == 1.0 {
            return self.mean();
        }
        if self.is_nonnegative() {
            return self.abs_moment(beta);
        }
        if beta.fract() != 0.0 || beta < 1.0 {
            return Err(Error::UnsupportedMoment(format!(
                "E[X^{beta}] is not real-valued for {self}, which takes negative values"
            )));
        }
        let k = beta as i32;
        Ok(match *self {
            DistributionSpec::Constant { value } => value.powi(k),
            DistributionSpec::Uniform { a, b } => {
                (b.powi(k + 1) - a.powi(k + 1)) / ((k + 1) as f64 * (b - a))
            }
            _ => unreachable!("only constant and uniform laws can be negative"),
        })
    }

    pub fn sampler(&self) -> Result<Sampler> {
        self.validate()?;
        Ok(match *self {
            DistributionSpec::Constant { value } => Sampler::Constant(value),
            DistributionSpec::Uniform { a, b } => Sampler::Uniform { a, width: b - a },
            DistributionSpec::Exponential { rate } => Sampler::Exponential { inv_rate: 1.0 / rate },
            DistributionSpec::Poisson { mean } => Sampler::Poisson(PoissonTable::new(mean)),
            DistributionSpec::Zeta { s } => Sampler::Zeta {
                inv_s_minus_1: 1.0 / (s - 1.0),
                s_minus_1: s - 1.0,
                b: 2f64.powf(s - 1.0),
            },
            DistributionSpec::Bernoulli { p } => Sampler::Bernoulli(p),
        })
    }
}

fn poisson_moment(mean: f64, beta: f64) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let ln_mean = mean.ln();
    let mut acc = KahanSum::default();
    let mut k = 1u64;
    loop {
        let kf = k as f64;
        let ln_p = kf * ln_mean - mean - libm::lgamma(kf + 1.0);
        let term = (ln_p + beta * kf.ln()).exp();
        acc.add(term);
        if kf > mean + 10.0 && term < 1e-17 * acc.value() {
            break;
        }
        k += 1;
    }
    acc.value()
}

/// Poisson cumulative table used for inversion by search.
///
/// The cut-off keeps more than 40 standard deviations of mass; a uniform
/// landing beyond the last entry maps to the table length.
#[derive(Debug, Clone)]
pub struct PoissonTable {
    cdf: Vec<f64>,
}

impl PoissonTable {
    fn new(mean: f64) -> Self {
        if mean == 0.0 {
            return PoissonTable { cdf: vec![1.0] };
        }
        let last = (mean + 40.0 * mean.sqrt() + 40.0).ceil() as usize;
        let ln_mean = mean.ln();
        let mut acc = 0.0;
        let cdf = (0..=last)
            .map(|k| {
                let kf = k as f64;
                acc += (kf * ln_mean - mean - libm::lgamma(kf + 1.0)).exp();
                acc
            })
            .collect();
        PoissonTable { cdf }
    }

    #[inline]
    fn invert(&self, u: f64) -> u64 {
        self.cdf.partition_point(|&f| f <= u) as u64
    }
}

/// Prepared sampler for a validated [`DistributionSpec`].
#[derive(Debug, Clone)]
pub enum Sampler {
    Constant(f64),
    Uniform { a: f64, width: f64 },
    Exponential { inv_rate: f64 },
    Poisson(PoissonTable),
    Zeta { s_minus_1: f64, inv_s_minus_1: f64, b: f64 },
    Bernoulli(f64),
}

impl Sampler {
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::Constant(v) => *v,
            Sampler::Uniform { a, width } => a + width * unit(rng),
            Sampler::Exponential { inv_rate } => -unit_open_closed(rng).ln() * inv_rate,
            Sampler::Poisson(table) => table.invert(unit(rng)) as f64,
            Sampler::Zeta { s_minus_1, inv_s_minus_1, b } => {
                sample_zeta(rng, *s_minus_1, *inv_s_minus_1, *b)
            }
            Sampler::Bernoulli(p) => {
                if unit(rng) < *p {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Draw an offspring count. Only meaningful for integer-valued laws.
    #[inline]
    pub fn sample_count<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match self {
            Sampler::Constant(v) => *v as u64,
            Sampler::Poisson(table) => table.invert(unit(rng)),
            // saturating float-to-int cast; values past 2^64 cannot occur for s > 1 with 53-bit uniforms
            other => other.sample(rng) as u64,
        }
    }
}

/// Exact rejection sampler for the zeta law (Devroye, Non-Uniform Random
/// Variate Generation, X.6.1). No truncation of the support.
#[inline]
fn sample_zeta<R: Rng + ?Sized>(rng: &mut R, s_minus_1: f64, inv_s_minus_1: f64, b: f64) -> f64 {
    loop {
        let u = unit_open_closed(rng);
        let x = u.powf(-inv_s_minus_1).floor();
        let t = (1.0 + 1.0 / x).powf(s_minus_1);
        let v = unit(rng);
        if v * x * (t - 1.0) * b <= t * (b - 1.0) {
            return x;
        }
    }
}

/// Dependence structure of the branching vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BranchingVectorSpec {
    /// `Q`, `N` and the i.i.d. weights `C_i` are mutually independent.
    Independent { q: DistributionSpec, n: DistributionSpec, c: DistributionSpec },
    /// `N = 2`, `C = (U, 1-U)`, `Q = 2U ln U + 2(1-U) ln(1-U) + 1` with one shared `U`.
    Quicksort,
    /// No additive term; the recursion propagates the weights only.
    Homogeneous { n: DistributionSpec, c: DistributionSpec },
}

impl fmt::Display for BranchingVectorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BranchingVectorSpec::Independent { q, n, c } => {
                write!(f, "independent(q={q}, n={n}, c={c})")
            }
            BranchingVectorSpec::Quicksort => f.write_str("quicksort"),
            BranchingVectorSpec::Homogeneous { n, c } => write!(f, "homogeneous(n={n}, c={c})"),
        }
    }
}

impl BranchingVectorSpec {
    pub fn variant_name(&self) -> &'static str {
        match self {
            BranchingVectorSpec::Independent { .. } => "independent",
            BranchingVectorSpec::Quicksort => "quicksort",
            BranchingVectorSpec::Homogeneous { .. } => "homogeneous",
        }
    }

    /// Short stable hash of the canonical model description.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.to_string().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Vector and `Q` draw counters. Per-worker values are merged with `+=`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DrawCounts {
    pub vector_draws: u64,
    pub q_draws: u64,
}

impl std::ops::AddAssign for DrawCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.vector_draws += rhs.vector_draws;
        self.q_draws += rhs.q_draws;
    }
}

impl std::ops::Add for DrawCounts {
    type Output = DrawCounts;
    fn add(mut self, rhs: Self) -> DrawCounts {
        self += rhs;
        self
    }
}

impl std::iter::Sum for DrawCounts {
    fn sum<I: Iterator<Item = DrawCounts>>(iter: I) -> Self {
        iter.fold(DrawCounts::default(), |a, b| a + b)
    }
}

#[derive(Debug, Clone)]
enum Components {
    Independent { q: Sampler, n: Sampler, c: Sampler },
    Quicksort,
    Homogeneous { n: Sampler, c: Sampler },
}

/// A validated branching vector ready for sampling.
#[derive(Debug, Clone)]
pub struct BranchingVector {
    spec: BranchingVectorSpec,
    components: Components,
}

/// The quicksort vector evaluated at a given uniform: `(q, [c1, c2])`.
pub fn quicksort_vector(u: f64) -> (f64, [f64; 2]) {
    (quicksort_toll(u), [u, 1.0 - u])
}

/// `2u ln u + 2(1-u) ln(1-u) + 1`, continuous at both endpoints.
pub fn quicksort_toll(u: f64) -> f64 {
    fn x_ln_x(x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            x * x.ln()
        }
    }
    2.0 * x_ln_x(u) + 2.0 * x_ln_x(1.0 - u) + 1.0
}

impl BranchingVector {
    pub fn new(spec: BranchingVectorSpec) -> Result<Self> {
        let check_n = |n: &DistributionSpec| -> Result<()> {
            n.validate()?;
            if !n.is_integer_valued() {
                return Err(Error::invalid(
                    "model.n",
                    format!("{n} is not integer-valued; N must be poisson, zeta, bernoulli or an integer constant"),
                ));
            }
            Ok(())
        };
        let components = match &spec {
            BranchingVectorSpec::Independent { q, n, c } => {
                check_n(n)?;
                Components::Independent { q: q.sampler()?, n: n.sampler()?, c: c.sampler()? }
            }
            BranchingVectorSpec::Quicksort => Components::Quicksort,
            BranchingVectorSpec::Homogeneous { n, c } => {
                check_n(n)?;
                if !c.is_nonnegative() {
                    return Err(Error::invalid("model.c", "homogeneous weights must be nonnegative"));
                }
                Components::Homogeneous { n: n.sampler()?, c: c.sampler()? }
            }
        };
        Ok(BranchingVector { spec, components })
    }

    pub fn spec(&self) -> &BranchingVectorSpec {
        &self.spec
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self.spec, BranchingVectorSpec::Homogeneous { .. })
    }

    /// Draws one generic vector. The weights replace the contents of
    /// `weights` and the return value is `Q`.
    #[inline]
    pub fn sample_into<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        weights: &mut Vec<f64>,
        counts: &mut DrawCounts,
    ) -> f64 {
        counts.vector_draws += 1;
        weights.clear();
        match &self.components {
            Components::Independent { q, n, c } => {
                let q = q.sample(rng);
                let n = n.sample_count(rng);
                weights.extend((0..n).map(|_| c.sample(rng)));
                q
            }
            Components::Quicksort => {
                let (q, c) = quicksort_vector(unit(rng));
                weights.extend_from_slice(&c);
                q
            }
            Components::Homogeneous { n, c } => {
                let n = n.sample_count(rng);
                weights.extend((0..n).map(|_| c.sample(rng)));
                0.0
            }
        }
    }

    /// Draws one generic vector as `(q, weights)`; `n` is `weights.len()`.
    pub fn sample_vector<R: Rng + ?Sized>(&self, rng: &mut R, counts: &mut DrawCounts) -> (f64, Vec<f64>) {
        let mut weights = Vec::new();
        let q = self.sample_into(rng, &mut weights, counts);
        (q, weights)
    }

    /// The `Q` of a full vector draw whose `N` and `C` are never used
    /// (leaves of a depth-limited tree). Counts as one vector draw.
    #[inline]
    pub fn sample_leaf<R: Rng + ?Sized>(&self, rng: &mut R, counts: &mut DrawCounts) -> f64 {
        counts.vector_draws += 1;
        self.draw_q(rng)
    }

    /// A stand-alone draw of `Q`, as used to seed the level-0 pool.
    #[inline]
    pub fn sample_q<R: Rng + ?Sized>(&self, rng: &mut R, counts: &mut DrawCounts) -> f64 {
        counts.q_draws += 1;
        self.draw_q(rng)
    }

    #[inline]
    fn draw_q<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.components {
            Components::Independent { q, .. } => q.sample(rng),
            Components::Quicksort => quicksort_toll(unit(rng)),
            Components::Homogeneous { .. } => 0.0,
        }
    }

    /// `E[N]`.
    pub fn mean_offspring(&self) -> Result<f64> {
        match &self.spec {
            BranchingVectorSpec::Independent { n, .. } | BranchingVectorSpec::Homogeneous { n, .. } => {
                n.mean()
            }
            BranchingVectorSpec::Quicksort => Ok(2.0),
        }
    }

    /// `rho_beta = E[sum_{i <= N} |C_i|^beta]`.
    pub fn rho(&self, beta: f64) -> Result<f64> {
        if !(beta >= 1.0) {
            return Err(Error::invalid("beta", format!("must be >= 1, got {beta}")));
        }
        match &self.spec {
            BranchingVectorSpec::Independent { n, c, .. } | BranchingVectorSpec::Homogeneous { n, c } => {
                let en = n.mean()?;
                if en == 0.0 {
                    return Ok(0.0);
                }
                Ok(en * c.abs_moment(beta)?)
            }
            BranchingVectorSpec::Quicksort => Ok(2.0 / (beta + 1.0)),
        }
    }

    /// `E[Q^beta]`, or `E[|Q|^beta]` when `absolute` is set.
    pub fn q_moment(&self, beta: f64, absolute: bool) -> Result<f64> {
        if !(beta >= 1.0) {
            return Err(Error::invalid("beta", format!("must be >= 1, got {beta}")));
        }
        match &self.spec {
            BranchingVectorSpec::Independent { q, .. } => {
                if absolute {
                    q.abs_moment(beta)
                } else {
                    q.raw_moment(beta)
                }
            }
            BranchingVectorSpec::Homogeneous { .. } => Ok(0.0),
            BranchingVectorSpec::Quicksort => {
                if absolute {
                    Ok(quicksort_q_integral(|q| q.abs().powf(beta)))
                } else if beta.fract() == 0.0 {
                    let k = beta as i32;
                    Ok(quicksort_q_integral(|q| q.powi(k)))
                } else {
                    Err(Error::UnsupportedMoment(format!(
                        "E[Q^{beta}] is not real-valued for the quicksort toll, which takes negative values"
                    )))
                }
            }
        }
    }

    /// Whether `E[(sum_{i <= N} |C_i|)^beta]` is finite.
    fn weight_sum_moment_finite(&self, beta: f64) -> bool {
        match &self.spec {
            BranchingVectorSpec::Quicksort => true,
            BranchingVectorSpec::Independent { n, c, .. } | BranchingVectorSpec::Homogeneous { n, c } => {
                matches!(c, DistributionSpec::Constant { value } if *value == 0.0)
                    || (n.abs_moment(beta).is_ok() && c.abs_moment(beta).is_ok())
            }
        }
    }

    /// Evaluates the sufficient conditions for geometric convergence of
    /// `R^(k)` in `L^beta`.
    pub fn check_conditions(&self, beta: f64) -> MomentReport {
        let mut report = MomentReport {
            beta,
            rho_1: f64::NAN,
            rho_beta: f64::NAN,
            q_abs_moment: f64::NAN,
            q_mean: f64::NAN,
            case: ConditionCase::Fail,
            reason: None,
        };
        if !(beta >= 1.0) {
            report.reason = Some(format!("beta must be >= 1, got {beta}"));
            return report;
        }
        let moments = (|| -> Result<()> {
            report.rho_1 = self.rho(1.0)?;
            report.rho_beta = self.rho(beta)?;
            report.q_abs_moment = self.q_moment(beta, true)?;
            report.q_mean = self.q_moment(1.0, false)?;
            Ok(())
        })();
        if let Err(e) = moments {
            report.reason = Some(e.to_string());
            return report;
        }
        if !self.weight_sum_moment_finite(beta) {
            report.reason = Some(format!("E[(sum |C_i|)^{beta}] is infinite"));
            return report;
        }
        let tol = CRITICAL_CASE_TOLERANCE;
        report.case = if report.rho_1.max(report.rho_beta) < 1.0 {
            ConditionCase::Contractive
        } else if (beta - 2.0).abs() <= tol
            && (report.rho_1 - 1.0).abs() <= tol
            && report.rho_beta < 1.0
            && report.q_mean.abs() <= tol
        {
            ConditionCase::CriticalCentered
        } else {
            report.reason = Some(format!(
                "max(rho_1, rho_beta) = {} >= 1 and the critical centered case does not apply",
                report.rho_1.max(report.rho_beta)
            ));
            ConditionCase::Fail
        };
        report
    }
}

fn quicksort_q_integral<F: Fn(f64) -> f64>(g: F) -> f64 {
    // Q is symmetric about 1/2, so integrate one half and double it.
    2.0 * integrate(|u| g(quicksort_toll(u)), 0.0, 0.5, 1e-13)
}

/// Which sufficient condition holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionCase {
    /// `max(rho_1, rho_beta) < 1`.
    Contractive,
    /// `beta = 2`, `rho_1 = 1`, `rho_2 < 1` and `E[Q] = 0`.
    CriticalCentered,
    Fail,
}

impl ConditionCase {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConditionCase::Contractive => "case_i",
            ConditionCase::CriticalCentered => "case_ii",
            ConditionCase::Fail => "fail",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub beta: f64,
    pub rho_1: f64,
    pub rho_beta: f64,
    /// `E[|Q|^beta]`.
    pub q_abs_moment: f64,
    pub q_mean: f64,
    pub case: ConditionCase,
    pub reason: Option<String>,
}

impl MomentReport {
    pub fn holds(&self) -> bool {
        self.case != ConditionCase::Fail
    }
}
