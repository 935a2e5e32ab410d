use crate::error::{Error, Result};

/// A finite sample sorted once at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    sorted: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(index) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteSample { index });
        }
        values.sort_by(f64::total_cmp);
        Ok(EmpiricalDistribution { sorted: values })
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec())
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of the sample `<= x`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.len() as f64
    }

    /// Fraction of the sample `> x`.
    pub fn tail(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }

    /// Left-continuous generalized inverse `inf { x : F_n(x) >= u }`.
    /// Arguments are clamped to `(0, 1]`; `u <= 0` returns the minimum.
    pub fn quantile(&self, u: f64) -> f64 {
        let n = self.len();
        let rank = (u * n as f64).ceil().clamp(1.0, n as f64) as usize;
        self.sorted[rank - 1]
    }

    pub fn mean(&self) -> f64 {
        self.sorted.iter().sum::<f64>() / self.len() as f64
    }

    /// Distinct sample points with the ECDF value at each, in increasing order.
    pub fn steps(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.len() as f64;
        self.sorted.iter().enumerate().filter_map(move |(i, &x)| {
            let last_of_run = self.sorted.get(i + 1).is_none_or(|&next| next != x);
            last_of_run.then(|| (x, (i + 1) as f64 / n))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_samples() {
        assert!(matches!(EmpiricalDistribution::new(vec![]), Err(Error::EmptySample)));
        assert!(matches!(
            EmpiricalDistribution::new(vec![1.0, f64::NAN]),
            Err(Error::NonFiniteSample { index: 1 })
        ));
    }

    #[test]
    fn cdf_and_quantile_conventions() {
        let e = EmpiricalDistribution::new(vec![3.0, 1.0, 2.0, 2.0]).unwrap();
        assert_eq!(e.sorted_values(), &[1.0, 2.0, 2.0, 3.0]);
        assert_eq!(e.cdf(0.5), 0.0);
        assert_eq!(e.cdf(1.0), 0.25);
        assert_eq!(e.cdf(2.0), 0.75);
        assert_eq!(e.cdf(9.0), 1.0);
        assert_eq!(e.quantile(0.25), 1.0);
        assert_eq!(e.quantile(0.2500001), 2.0);
        assert_eq!(e.quantile(0.75), 2.0);
        assert_eq!(e.quantile(1.0), 3.0);
        assert_eq!(e.quantile(0.0), 1.0);
        let steps: Vec<_> = e.steps().collect();
        assert_eq!(steps, vec![(1.0, 0.25), (2.0, 0.75), (3.0, 1.0)]);
    }
}
