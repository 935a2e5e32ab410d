//! Iterative bootstrap for `R^(k)`.
//!
//! Level 0 holds `m` i.i.d. copies of `Q`. Level `j` is built from level
//! `j - 1` by drawing one fresh branching vector per entry and combining its
//! weights with values resampled uniformly with replacement from the
//! previous pool:
//!
//! ```text
//! R(j)_i = sum_{r <= N_i} C_(i,r) * R(j-1)_(i,r) + Q_i
//! ```
//!
//! Each level costs exactly `m` vector draws, so a depth-`k` run costs `k * m`
//! (plus `m` draws of `Q` for the first pool).
//!
//! Entry `i` of level `j` draws its vector from stream `(seed, PoolVector, j, i)`
//! and its resampling indices from `(seed, PoolIndex, j, i)`. Pools are
//! therefore bit-identical for any evaluation order or worker count.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{BranchingVector, DrawCounts};
use crate::rng::{stream, Domain};

/// A level-`j` sample pool.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePool {
    pub level: usize,
    pub values: Vec<f64>,
    /// `(experiment seed, level)` that generated this pool.
    pub seed_lineage: (u64, usize),
}

impl SamplePool {
    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Level-0 pool: `m` draws of `Q`, or the root weight 1 for the homogeneous recursion.
pub fn init_pool(vector: &BranchingVector, m: usize, seed: u64, counts: &mut DrawCounts) -> Result<SamplePool> {
    if m == 0 {
        return Err(Error::invalid("m", "pool size must be at least 1"));
    }
    let values = if vector.is_homogeneous() {
        vec![1.0; m]
    } else {
        let (values, local): (Vec<f64>, Vec<DrawCounts>) = (0..m)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream(seed, Domain::PoolInit, 0, i as u64);
                let mut c = DrawCounts::default();
                (vector.sample_q(&mut rng, &mut c), c)
            })
            .unzip();
        *counts += local.into_iter().sum();
        values
    };
    Ok(SamplePool { level: 0, values, seed_lineage: (seed, 0) })
}

/// One bootstrap entry: a fresh vector combined with resampled parents.
#[inline]
fn combine<R: Rng + ?Sized, S: Rng + ?Sized>(
    vector: &BranchingVector,
    parents: &[f64],
    vector_rng: &mut R,
    index_rng: &mut S,
    weights: &mut Vec<f64>,
    counts: &mut DrawCounts,
) -> f64 {
    let q = vector.sample_into(vector_rng, weights, counts);
    let m = parents.len();
    weights
        .iter()
        .map(|c| c * parents[index_rng.random_range(0..m)])
        .sum::<f64>()
        + q
}

/// Builds the next level from `pool`.
pub fn advance_pool(vector: &BranchingVector, pool: &SamplePool, counts: &mut DrawCounts) -> SamplePool {
    let seed = pool.seed_lineage.0;
    let level = pool.level + 1;
    let parents = &pool.values;
    let (values, local): (Vec<f64>, Vec<DrawCounts>) = (0..parents.len())
        .into_par_iter()
        .map_init(Vec::new, |weights, i| {
            let mut vector_rng = stream(seed, Domain::PoolVector, level as u64, i as u64);
            let mut index_rng = stream(seed, Domain::PoolIndex, level as u64, i as u64);
            let mut c = DrawCounts::default();
            let v = combine(vector, parents, &mut vector_rng, &mut index_rng, weights, &mut c);
            (v, c)
        })
        .unzip();
    *counts += local.into_iter().sum();
    SamplePool { level, values, seed_lineage: (seed, level) }
}

/// All pools of one run together with the draw counters.
#[derive(Debug, Clone)]
pub struct BootstrapRun {
    pub pools: Vec<SamplePool>,
    pub counts: DrawCounts,
}

impl BootstrapRun {
    pub fn final_pool(&self) -> &SamplePool {
        self.pools.last().expect("a run has at least the level-0 pool")
    }
}

/// Runs levels `0..=k` and keeps every pool.
pub fn run_bootstrap(vector: &BranchingVector, k: usize, m: usize, seed: u64) -> Result<BootstrapRun> {
    let mut counts = DrawCounts::default();
    let mut pools = Vec::with_capacity(k + 1);
    pools.push(init_pool(vector, m, seed, &mut counts)?);
    for _ in 0..k {
        let next = advance_pool(vector, pools.last().unwrap(), &mut counts);
        pools.push(next);
    }
    Ok(BootstrapRun { pools, counts })
}

/// Streaming variant of [`run_bootstrap`]: only the previous level is kept in memory.
pub fn run_bootstrap_final(
    vector: &BranchingVector,
    k: usize,
    m: usize,
    seed: u64,
) -> Result<(SamplePool, DrawCounts)> {
    let mut counts = DrawCounts::default();
    let mut pool = init_pool(vector, m, seed, &mut counts)?;
    for _ in 0..k {
        pool = advance_pool(vector, &pool, &mut counts);
    }
    Ok((pool, counts))
}
