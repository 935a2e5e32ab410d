use crate::error::{Error, Result};

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::invalid("alpha", format!("must lie in (1, 2), got {alpha}")));
    }
    Ok(())
}

fn alpha_factor(alpha: f64) -> f64 {
    2.0 * alpha / (alpha - 1.0) + 2.0 / (2.0 - alpha)
}

/// Upper bound on `E[d1(F_n, F)]` for `n` i.i.d. draws with `E|X|^alpha = moment`:
/// `n^(-1 + 1/alpha) (2 alpha / (alpha - 1) + 2 / (2 - alpha)) E|X|^alpha`.
pub fn empirical_d1_bound(n: usize, alpha: f64, moment: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if n == 0 {
        return Err(Error::invalid("n", "sample size must be at least 1"));
    }
    if !(moment >= 0.0 && moment.is_finite()) {
        return Err(Error::invalid("moment", format!("must be finite and >= 0, got {moment}")));
    }
    Ok((n as f64).powf(-1.0 + 1.0 / alpha) * alpha_factor(alpha) * moment)
}

/// `K_alpha = H_alpha (2 alpha / (alpha - 1) + 2 / (2 - alpha))` from
/// `H_alpha = sup_k E|R^(k)|^alpha`.
pub fn k_alpha_constant(h_alpha: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(h_alpha * alpha_factor(alpha))
}

/// Bound on `E[d1(F_hat_{k,m}, F_k)]`: `K_alpha m^(-1 + 1/alpha) sum_{i=0}^k rho_1^i`.
pub fn theorem_bound(k: usize, m: usize, alpha: f64, k_alpha: f64, rho_1: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if m == 0 {
        return Err(Error::invalid("m", "pool size must be at least 1"));
    }
    if !(k_alpha >= 0.0 && k_alpha.is_finite()) {
        return Err(Error::invalid("k_alpha", format!("must be finite and >= 0, got {k_alpha}")));
    }
    if !(rho_1 >= 0.0 && rho_1.is_finite()) {
        return Err(Error::invalid("rho_1", format!("must be finite and >= 0, got {rho_1}")));
    }
    let geometric: f64 = (0..=k).map(|i| rho_1.powi(i as i32)).sum();
    Ok(k_alpha * (m as f64).powf(-1.0 + 1.0 / alpha) * geometric)
}
