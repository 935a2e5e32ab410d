//! Empirical distributions, the Kantorovich-Rubinstein (Wasserstein-1)
//! distance, plug-in estimators and the convergence bounds they are checked
//! against.

mod analytic;
mod bounds;
mod distance;
mod ecdf;
mod estimate;

pub use analytic::AnalyticCdf;
pub use bounds::{empirical_d1_bound, k_alpha_constant, theorem_bound};
pub use distance::{d1_empirical, d1_vs_analytic};
pub use ecdf::EmpiricalDistribution;
pub use estimate::{estimate_h, plug_in_average, HFunction};
