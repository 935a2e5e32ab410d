use crate::error::Result;
use crate::numeric::KahanSum;

use super::{AnalyticCdf, EmpiricalDistribution};

/// `d1` between two empirical laws, `integral_0^1 |F^-1(u) - G^-1(u)| du`.
///
/// Equal sizes reduce to the mean absolute difference of order statistics.
/// Otherwise the quantile functions are step functions on the grids `{i/n}`
/// and `{j/m}`; walking the merged grid in units of `1/(n m)` integrates
/// them exactly.
pub fn d1_empirical(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> f64 {
    let xs = a.sorted_values();
    let ys = b.sorted_values();
    let (n, m) = (xs.len(), ys.len());
    if n == m {
        let total: KahanSum = xs.iter().zip(ys).map(|(x, y)| (x - y).abs()).collect();
        return total.value() / n as f64;
    }
    // cell i of `a` covers (i*m, (i+1)*m] and cell j of `b` covers (j*n, (j+1)*n]
    let (n64, m64) = (n as u64, m as u64);
    let mut total = KahanSum::default();
    let (mut i, mut j) = (0usize, 0usize);
    let mut pos = 0u64;
    while i < n && j < m {
        let end_a = (i as u64 + 1) * m64;
        let end_b = (j as u64 + 1) * n64;
        let end = end_a.min(end_b);
        total.add((end - pos) as f64 * (xs[i] - ys[j]).abs());
        pos = end;
        if end == end_a {
            i += 1;
        }
        if end == end_b {
            j += 1;
        }
    }
    total.value() / (n64 * m64) as f64
}

/// `d1` between an empirical law and an analytic reference, computed exactly
/// as `integral |F_n(x) - F(x)| dx` from the reference's integrated CDF.
pub fn d1_vs_analytic(a: &EmpiricalDistribution, reference: &AnalyticCdf) -> Result<f64> {
    let mean = reference.require_finite_mean()?;
    let xs = a.sorted_values();
    let n = xs.len();
    let phi = |x: f64| reference.integrated_cdf(x);

    let mut total = KahanSum::default();
    // left of the sample F_n = 0
    total.add(phi(xs[0]));
    for i in 0..n - 1 {
        let (lo, hi) = (xs[i], xs[i + 1]);
        if hi == lo {
            continue;
        }
        let level = (i + 1) as f64 / n as f64;
        // F < level strictly left of the crossing point, F >= level from it on
        let cross = reference.quantile(level).clamp(lo, hi);
        let (p_lo, p_cross, p_hi) = (phi(lo), phi(cross), phi(hi));
        total.add(level * (cross - lo) - (p_cross - p_lo));
        total.add((p_hi - p_cross) - level * (hi - cross));
    }
    // right of the sample F_n = 1: integral of (1 - F) = E[X] - x + Phi(x)
    let last = xs[n - 1];
    total.add(mean - last + phi(last));
    Ok(total.value().max(0.0))
}
