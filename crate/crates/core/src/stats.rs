//! Replicate summaries used by the runner and the acceptance suite.

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub n: usize,
}

impl MeanEstimate {
    pub fn from_values(xs: &[f64]) -> Self {
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let std_err = if n > 1 {
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        MeanEstimate { mean, std_err, n }
    }

    /// `|mean - target| <= z * std_err`.
    pub fn within(&self, target: f64, z: f64) -> bool {
        (self.mean - target).abs() <= z * self.std_err
    }

    pub fn ci95(&self) -> (f64, f64) {
        (self.mean - 1.96 * self.std_err, self.mean + 1.96 * self.std_err)
    }
}

/// Ratio-of-means estimate `mean(y) / mean(x)` with a delta-method standard error.
pub fn ratio_of_means(y: &[f64], x: &[f64]) -> MeanEstimate {
    let n = y.len() as f64;
    let my = y.iter().sum::<f64>() / n;
    let mx = x.iter().sum::<f64>() / n;
    let ratio = my / mx;
    let resid: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - ratio * b).collect();
    let var = resid.iter().map(|r| r * r).sum::<f64>() / (n - 1.0);
    MeanEstimate { mean: ratio, std_err: (var / n).sqrt() / mx.abs(), n: y.len() }
}

/// Sample variance with the standard error from the fourth central moment.
pub fn variance_estimate(xs: &[f64]) -> MeanEstimate {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    let var = m2 * n / (n - 1.0);
    MeanEstimate { mean: var, std_err: ((m4 - m2 * m2) / n).sqrt(), n: xs.len() }
}

/// Normal-approximation 95% interval for a proportion `p` from `n` draws.
pub fn proportion_ci95(p: f64, n: usize) -> (f64, f64) {
    let se = (p * (1.0 - p) / n as f64).sqrt();
    (p - 1.96 * se, p + 1.96 * se)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summaries() {
        let m = MeanEstimate::from_values(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m.mean, 2.5);
        assert!((m.std_err - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert!(m.within(2.5, 0.0));
        let r = ratio_of_means(&[2.0, 4.0, 6.0], &[1.0, 2.0, 3.0]);
        assert_eq!(r.mean, 2.0);
        assert_eq!(r.std_err, 0.0);
        assert!((log_log_slope(&[1.0, 10.0, 100.0], &[1.0, 0.1, 0.01]) + 1.0).abs() < 1e-12);
        let v = variance_estimate(&[1.0, -1.0, 1.0, -1.0]);
        assert!((v.mean - 4.0 / 3.0).abs() < 1e-15);
    }
}
