use std::fmt;
use std::str::FromStr;

use crate::bootstrap::SamplePool;
use crate::error::{Error, Result};
use crate::numeric::KahanSum;

/// Test functions for plug-in estimates `(1/m) sum h(R_i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HFunction {
    Identity,
    Abs,
    /// `|x|^p`, `p >= 1`.
    Power(f64),
    /// `1(x > t)`.
    IndicatorGt(f64),
    /// `x` clamped to `[-M, M]`.
    Clipped(f64),
}

impl HFunction {
    pub fn new_power(p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::invalid("h.power", format!("exponent must be >= 1, got {p}")));
        }
        Ok(HFunction::Power(p))
    }

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            HFunction::Identity => x,
            HFunction::Abs => x.abs(),
            HFunction::Power(p) => x.abs().powf(p),
            HFunction::IndicatorGt(t) => (x > t) as u8 as f64,
            HFunction::Clipped(m) => x.clamp(-m, m),
        }
    }

    /// Whether `h` is continuous with `|h(x)| <= C (1 + |x|)`, the class for
    /// which the bootstrap plug-in estimator is known to be consistent.
    pub fn within_guarantee(&self) -> bool {
        match *self {
            HFunction::Identity | HFunction::Abs | HFunction::Clipped(_) => true,
            HFunction::Power(p) => p <= 1.0,
            HFunction::IndicatorGt(_) => false,
        }
    }
}

impl fmt::Display for HFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HFunction::Identity => f.write_str("identity"),
            HFunction::Abs => f.write_str("abs"),
            HFunction::Power(p) => write!(f, "power({p})"),
            HFunction::IndicatorGt(t) => write!(f, "indicator_gt({t})"),
            HFunction::Clipped(m) => write!(f, "clipped({m})"),
        }
    }
}

impl FromStr for HFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let unknown = || Error::invalid("h", format!("unknown function `{s}`"));
        match s {
            "identity" => return Ok(HFunction::Identity),
            "abs" => return Ok(HFunction::Abs),
            _ => {}
        }
        let (name, rest) = s.split_once('(').ok_or_else(unknown)?;
        let arg: f64 = rest
            .strip_suffix(')')
            .and_then(|a| a.trim().parse().ok())
            .ok_or_else(|| Error::invalid("h", format!("bad argument in `{s}`")))?;
        match name.trim() {
            "power" => HFunction::new_power(arg),
            "indicator_gt" => Ok(HFunction::IndicatorGt(arg)),
            "clipped" if arg > 0.0 => Ok(HFunction::Clipped(arg)),
            "clipped" => Err(Error::invalid("h.clipped", "bound must be positive")),
            _ => Err(unknown()),
        }
    }
}

pub fn plug_in_average(values: &[f64], h: HFunction) -> f64 {
    let total: KahanSum = values.iter().map(|&x| h.apply(x)).collect();
    total.value() / values.len() as f64
}

/// `(1/m) sum_i h(R_i)` over the pool.
pub fn estimate_h(pool: &SamplePool, h: HFunction) -> f64 {
    plug_in_average(&pool.values, h)
}
