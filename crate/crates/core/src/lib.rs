//! Simulation of the branching linear recursion
//! `R^(k+1) = sum_{i <= N} C_i R^(k)_i + Q` (in distribution).
//!
//! Two samplers are provided: [`exact`] expands the weighted branching tree
//! (cost exponential in `k` when `E[N] > 1`) and [`bootstrap`] resamples from
//! the previous level's pool (cost `k * m`). [`metrics`] measures how close
//! the two are in Wasserstein-1 distance.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod bootstrap;
pub mod config;
pub mod error;
pub mod exact;
pub mod metrics;
pub mod model;
pub mod numeric;
pub mod output;
pub mod rng;
pub mod runner;
pub mod stats;

pub use error::{Error, Result};
pub use model::{BranchingVector, BranchingVectorSpec, DistributionSpec, DrawCounts};
