//! Naive Monte Carlo on the explicit weighted branching tree.
//!
//! Each sample expands the tree from the root down to depth `k` with an
//! explicit stack and accumulates `Q_i * Pi_i` per generation. Cost grows
//! like `sum_j E[N]^j`, which is what the bootstrap avoids.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{BranchingVector, DrawCounts};
use crate::numeric::KahanSum;
use crate::rng::{stream, Domain};

/// Default per-sample node budget.
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

/// One exact sample of `R^(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeRunResult {
    pub r_k: f64,
    /// `W_0, ..., W_k`, the per-generation sums of `Q_i * Pi_i`.
    pub level_sums: Vec<f64>,
    pub nodes_visited: u64,
    /// The node budget ran out; the values are partial.
    pub truncated: bool,
}

/// One exact sample of the homogeneous weight sum `W^(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightRunResult {
    pub w_k: f64,
    /// `sum_{i in A_j} Pi_i` for `j = 0, ..., k`.
    pub level_weights: Vec<f64>,
    pub nodes_visited: u64,
    pub truncated: bool,
}

struct Expansion {
    levels: Vec<f64>,
    nodes_visited: u64,
    truncated: bool,
}

/// Depth-first expansion accumulating `value(node) * Pi_node` per level, where
/// `value` is `Q` (or 1 for the homogeneous weights).
fn expand<R: Rng + ?Sized>(
    vector: &BranchingVector,
    k: usize,
    rng: &mut R,
    node_budget: u64,
    counts: &mut DrawCounts,
    unit_value: bool,
) -> Expansion {
    let mut levels = vec![KahanSum::default(); k + 1];
    let mut stack: Vec<(usize, f64)> = vec![(0, 1.0)];
    let mut weights = Vec::new();
    let mut nodes_visited = 0u64;
    let mut truncated = false;

    while let Some((depth, pi)) = stack.pop() {
        if nodes_visited >= node_budget {
            truncated = true;
            break;
        }
        nodes_visited += 1;
        if depth == k {
            let q = if unit_value { 1.0 } else { vector.sample_leaf(rng, counts) };
            if unit_value {
                counts.vector_draws += 1;
            }
            levels[depth].add(q * pi);
            continue;
        }
        let q = vector.sample_into(rng, &mut weights, counts);
        levels[depth].add(if unit_value { pi } else { q * pi });
        if nodes_visited + stack.len() as u64 + weights.len() as u64 > node_budget {
            truncated = true;
            break;
        }
        stack.extend(weights.iter().rev().map(|c| (depth + 1, pi * c)));
    }

    Expansion {
        levels: levels.iter().map(KahanSum::value).collect(),
        nodes_visited,
        truncated,
    }
}

/// Samples `R^(k)` by expanding the tree to depth `k`.
pub fn simulate_r_exact<R: Rng + ?Sized>(
    vector: &BranchingVector,
    k: usize,
    rng: &mut R,
    node_budget: u64,
    counts: &mut DrawCounts,
) -> Result<TreeRunResult> {
    if node_budget == 0 {
        return Err(Error::invalid("node_budget", "must be at least 1"));
    }
    let e = expand(vector, k, rng, node_budget, counts, false);
    let r_k = e.levels.iter().copied().collect::<KahanSum>().value();
    Ok(TreeRunResult { r_k, level_sums: e.levels, nodes_visited: e.nodes_visited, truncated: e.truncated })
}

/// Samples the homogeneous weight sum `W^(k) = sum_{i in A_k} Pi_i`.
pub fn simulate_w_exact<R: Rng + ?Sized>(
    vector: &BranchingVector,
    k: usize,
    rng: &mut R,
    node_budget: u64,
    counts: &mut DrawCounts,
) -> Result<WeightRunResult> {
    if !vector.is_homogeneous() {
        return Err(Error::WrongVariant {
            variant: vector.spec().variant_name(),
            reason: "W^(k) is defined for the homogeneous variant only",
        });
    }
    if node_budget == 0 {
        return Err(Error::invalid("node_budget", "must be at least 1"));
    }
    let e = expand(vector, k, rng, node_budget, counts, true);
    Ok(WeightRunResult {
        w_k: e.levels[k],
        level_weights: e.levels,
        nodes_visited: e.nodes_visited,
        truncated: e.truncated,
    })
}

/// `sum_{j=0}^k E[N]^j`, the expected node count (and vector draws) of one exact sample.
pub fn expected_node_count(vector: &BranchingVector, k: usize) -> Result<f64> {
    let en = vector.mean_offspring()?;
    Ok(geometric_sum(en, k))
}

/// `sum_{j=0}^k r^j`.
pub fn geometric_sum(r: f64, k: usize) -> f64 {
    (0..=k).map(|j| r.powi(j as i32)).sum()
}

/// Independent exact samples `0..reps`, each on its own `(seed, replicate)`
/// stream, so the output does not depend on the thread count.
pub fn sample_exact_batch(
    vector: &BranchingVector,
    k: usize,
    reps: usize,
    seed: u64,
    node_budget: u64,
) -> Result<(Vec<TreeRunResult>, DrawCounts)> {
    let runs: Vec<(TreeRunResult, DrawCounts)> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream(seed, Domain::ExactTree, rep as u64, 0);
            let mut counts = DrawCounts::default();
            simulate_r_exact(vector, k, &mut rng, node_budget, &mut counts).map(|r| (r, counts))
        })
        .collect::<Result<_>>()?;
    let counts = runs.iter().map(|(_, c)| *c).sum();
    Ok((runs.into_iter().map(|(r, _)| r).collect(), counts))
}

/// Like [`sample_exact_batch`] but keeps only the `R^(k)` values.
pub fn sample_exact_values(
    vector: &BranchingVector,
    k: usize,
    reps: usize,
    seed: u64,
    node_budget: u64,
) -> Result<(Vec<f64>, DrawCounts, u64)> {
    let runs: Vec<(f64, DrawCounts, bool)> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream(seed, Domain::ExactTree, rep as u64, 0);
            let mut counts = DrawCounts::default();
            simulate_r_exact(vector, k, &mut rng, node_budget, &mut counts)
                .map(|r| (r.r_k, counts, r.truncated))
        })
        .collect::<Result<_>>()?;
    let truncated = runs.iter().filter(|r| r.2).count() as u64;
    let counts = runs.iter().map(|r| r.1).sum();
    Ok((runs.into_iter().map(|r| r.0).collect(), counts, truncated))
}
