//! Experiment commands behind the CLI. Each command writes its files under
//! the configured output directory and returns a [`RunSummary`].

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use crate::asymptotics::{g_k_curve, TailAsymptotic, TailInputs};
use crate::bootstrap::{run_bootstrap, run_bootstrap_final, SamplePool};
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::exact::{expected_node_count, sample_exact_batch, sample_exact_values};
use crate::metrics::{d1_empirical, estimate_h, k_alpha_constant, plug_in_average, theorem_bound, EmpiricalDistribution};
use crate::model::{BranchingVector, BranchingVectorSpec, DistributionSpec, DrawCounts, MomentReport};
use crate::output::{
    fmt_f64, read_values, write_distance_table, write_ecdf, write_summary, write_values, write_xy, Provenance,
};
use crate::rng::replicate_seed;
use crate::stats::{proportion_ci95, MeanEstimate};

/// Naive runs whose expected cost exceeds this fraction of the global budget get a warning.
pub const BUDGET_WARNING_FRACTION: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub command: &'static str,
    pub counts: DrawCounts,
    pub elapsed: Duration,
    pub outputs: Vec<PathBuf>,
    pub condition_report: MomentReport,
    pub warnings: Vec<String>,
    /// Command-specific results, in output order.
    pub entries: Vec<(String, String)>,
}

impl RunSummary {
    pub fn entry(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// Seed of replicate `rep`; replicate 0 runs on the experiment seed itself.
pub fn rep_seed(seed: u64, rep: usize) -> u64 {
    if rep == 0 {
        seed
    } else {
        replicate_seed(seed, rep as u64)
    }
}

struct Context<'a> {
    cfg: &'a ExperimentConfig,
    vector: BranchingVector,
    report: MomentReport,
    prov: Provenance,
    started: Instant,
    counts: DrawCounts,
    outputs: Vec<PathBuf>,
    warnings: Vec<String>,
    entries: Vec<(String, String)>,
}

impl<'a> Context<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Result<Self> {
        let vector = BranchingVector::new(cfg.model)?;
        let report = vector.check_conditions(cfg.beta);
        let mut warnings = Vec::new();
        if !report.holds() {
            warnings.push(format!(
                "convergence conditions do not hold at beta = {}: {}",
                cfg.beta,
                report.reason.as_deref().unwrap_or("unknown")
            ));
        }
        let prov = Provenance {
            model: cfg.model.to_string(),
            model_hash: cfg.model.fingerprint(),
            seed: cfg.seed,
            k: cfg.k,
            m: None,
            extra: Vec::new(),
        };
        Ok(Context {
            cfg,
            vector,
            report,
            prov,
            started: Instant::now(),
            counts: DrawCounts::default(),
            outputs: Vec::new(),
            warnings,
            entries: Vec::new(),
        })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.cfg.out_dir.join(name)
    }

    fn put(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    fn output(&mut self, path: PathBuf) {
        self.outputs.push(path);
    }

    /// Refuses naive runs above the global budget, warns on large ones.
    fn naive_budget(&mut self, reps: usize) -> Result<f64> {
        let expected = expected_node_count(&self.vector, self.cfg.k)? * reps as f64;
        if expected > self.cfg.global_budget {
            return Err(Error::BudgetExceeded { expected, budget: self.cfg.global_budget });
        }
        if expected > BUDGET_WARNING_FRACTION * self.cfg.global_budget {
            self.warnings.push(format!(
                "naive run expects {expected:.3e} vector draws ({:.0}% of the global budget)",
                100.0 * expected / self.cfg.global_budget
            ));
        }
        Ok(expected)
    }

    fn naive_reference(&mut self, reps: usize) -> Result<EmpiricalDistribution> {
        let expected = self.naive_budget(reps)?;
        let (values, counts, truncated) =
            sample_exact_values(&self.vector, self.cfg.k, reps, self.cfg.seed, self.cfg.node_budget)?;
        self.counts += counts;
        self.put("reference.reps", reps);
        self.put("reference.expected_draws", fmt_f64(expected));
        self.put("reference.vector_draws", counts.vector_draws);
        if truncated > 0 {
            self.warnings.push(format!("{truncated} naive samples hit the node budget and are partial"));
        }
        EmpiricalDistribution::new(values)
    }

    fn bootstrap_pool(&mut self, m: usize, seed: u64) -> Result<SamplePool> {
        let (pool, counts) = run_bootstrap_final(&self.vector, self.cfg.k, m, seed)?;
        self.counts += counts;
        Ok(pool)
    }

    fn finish(self, command: &'static str) -> Result<RunSummary> {
        let cfg = self.cfg;
        let r = &self.report;
        let mut lines: Vec<(String, String)> = vec![
            ("command".into(), command.into()),
            ("model".into(), cfg.model.to_string()),
            ("model_hash".into(), cfg.model.fingerprint()),
            ("seed".into(), cfg.seed.to_string()),
            ("k".into(), cfg.k.to_string()),
            ("m".into(), cfg.m.to_string()),
            ("reps".into(), cfg.reps.to_string()),
            ("vector_draws".into(), self.counts.vector_draws.to_string()),
            ("q_draws".into(), self.counts.q_draws.to_string()),
            ("condition.beta".into(), fmt_f64(r.beta)),
            ("condition.case".into(), r.case.as_str().into()),
            ("condition.rho_1".into(), fmt_f64(r.rho_1)),
            ("condition.rho_beta".into(), fmt_f64(r.rho_beta)),
            ("condition.q_abs_moment".into(), fmt_f64(r.q_abs_moment)),
            ("condition.q_mean".into(), fmt_f64(r.q_mean)),
        ];
        if let Some(reason) = &r.reason {
            lines.push(("condition.reason".into(), reason.clone()));
        }
        for (i, w) in self.warnings.iter().enumerate() {
            lines.push((format!("warning.{i}"), w.clone()));
        }
        lines.extend(self.entries.iter().cloned());
        let mut outputs = self.outputs;
        for (i, p) in outputs.iter().enumerate() {
            let name = p.file_name().map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned());
            lines.push((format!("output.{i}"), name));
        }
        outputs.push(write_summary(&cfg.out_dir.join("summary.txt"), &lines)?);
        Ok(RunSummary {
            command,
            counts: self.counts,
            elapsed: self.started.elapsed(),
            outputs,
            condition_report: self.report,
            warnings: self.warnings,
            entries: self.entries,
        })
    }
}

/// Runs the bootstrap `reps` times and writes the final pools and their ECDFs.
pub fn cmd_bootstrap(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let mut ctx = Context::new(cfg)?;
    for rep in 0..cfg.reps {
        let seed = rep_seed(cfg.seed, rep);
        let pool = if cfg.streaming {
            ctx.bootstrap_pool(cfg.m, seed)?
        } else {
            let run = run_bootstrap(&ctx.vector, cfg.k, cfg.m, seed)?;
            ctx.counts += run.counts;
            if rep == 0 {
                for p in &run.pools {
                    ctx.put(format!("level.{}.mean", p.level), fmt_f64(p.mean()));
                }
            }
            run.pools.into_iter().last().expect("k + 1 pools")
        };
        let suffix = if cfg.reps == 1 { String::new() } else { format!("_rep{rep}") };
        let prov = ctx.prov.with_m(cfg.m).with("level", pool.level).with("pool_seed", seed);
        let p = write_values(&ctx.path(&format!("pool{suffix}.csv")), &prov, &pool.values)?;
        ctx.output(p);
        let ecdf = EmpiricalDistribution::from_slice(&pool.values)?;
        let p = write_ecdf(&ctx.path(&format!("ecdf{suffix}.csv")), &prov, &ecdf)?;
        ctx.output(p);
        ctx.put(format!("rep.{rep}.mean"), fmt_f64(pool.mean()));
    }
    ctx.finish("bootstrap")
}

/// Draws `reps` exact samples of `R^(k)` from the explicit tree.
pub fn cmd_naive(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let mut ctx = Context::new(cfg)?;
    let expected = ctx.naive_budget(cfg.reps)?;
    let (runs, counts) = sample_exact_batch(&ctx.vector, cfg.k, cfg.reps, cfg.seed, cfg.node_budget)?;
    ctx.counts += counts;
    let values: Vec<f64> = runs.iter().map(|r| r.r_k).collect();
    let nodes: u64 = runs.iter().map(|r| r.nodes_visited).sum();
    let truncated = runs.iter().filter(|r| r.truncated).count();
    if truncated > 0 {
        ctx.warnings.push(format!("{truncated} samples hit the node budget and are partial"));
    }
    let prov = ctx.prov.with("reps", cfg.reps);
    let p = write_values(&ctx.path("samples.csv"), &prov, &values)?;
    ctx.output(p);
    let ecdf = EmpiricalDistribution::new(values.clone())?;
    let p = write_ecdf(&ctx.path("ecdf.csv"), &prov, &ecdf)?;
    ctx.output(p);
    let est = MeanEstimate::from_values(&values);
    ctx.put("expected_draws", fmt_f64(expected));
    ctx.put("nodes_visited", nodes);
    ctx.put("truncated_samples", truncated);
    ctx.put("sample.mean", fmt_f64(est.mean));
    ctx.put("sample.std_err", fmt_f64(est.std_err));
    ctx.finish("naive")
}

fn tail_rows(ecdf: &EmpiricalDistribution, range: (u64, u64)) -> Vec<(f64, f64)> {
    (range.0..=range.1).map(|x| (x as f64, ecdf.tail(x as f64))).collect()
}

/// Naive reference versus bootstrap pools for each `m` in `compare.m`.
pub fn cmd_compare(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let mut ctx = Context::new(cfg)?;
    let reference = ctx.naive_reference(cfg.reference_reps)?;
    let prov_ref = ctx.prov.with("reference_reps", cfg.reference_reps);
    let p = write_ecdf(&ctx.path("ecdf_reference.csv"), &prov_ref, &reference)?;
    ctx.output(p);
    if let Some(range) = cfg.tail_range {
        let p = write_xy(&ctx.path("tail_reference.csv"), &prov_ref, "x,tail", &tail_rows(&reference, range))?;
        ctx.output(p);
    }

    let rho_1 = ctx.vector.rho(1.0).ok();
    let mut table = Vec::new();
    for &m in &cfg.compare_m {
        let pool = ctx.bootstrap_pool(m, cfg.seed)?;
        let ecdf = EmpiricalDistribution::new(pool.values)?;
        let prov = ctx.prov.with_m(m);
        let p = write_ecdf(&ctx.path(&format!("ecdf_m{m}.csv")), &prov, &ecdf)?;
        ctx.output(p);
        if let Some(range) = cfg.tail_range {
            let p = write_xy(&ctx.path(&format!("tail_m{m}.csv")), &prov, "x,tail", &tail_rows(&ecdf, range))?;
            ctx.output(p);
        }
        let d1 = d1_empirical(&ecdf, &reference);
        let bound = match (cfg.bound, rho_1) {
            (Some(b), Some(rho_1)) => {
                Some(theorem_bound(cfg.k, m, b.alpha, k_alpha_constant(b.h_alpha, b.alpha)?, rho_1)?)
            }
            _ => None,
        };
        ctx.put(format!("d1.m{m}"), fmt_f64(d1));
        if let Some(b) = bound {
            ctx.put(format!("bound.m{m}"), fmt_f64(b));
        }
        table.push((m, d1, bound));
    }
    let p = write_distance_table(&ctx.path("distances.csv"), &ctx.prov, &table)?;
    ctx.output(p);

    if let Some(asym) = cfg.asymptotic.clone() {
        tail_overlays(&mut ctx, &asym)?;
    }
    ctx.finish("compare")
}

/// Writes the `G_k` overlay for the printed constant, for the printed inputs
/// recomputed by direct summation, and for inputs derived from the model.
fn tail_overlays(ctx: &mut Context<'_>, asym: &crate::config::AsymptoticConfig) -> Result<()> {
    let cfg = ctx.cfg;
    let BranchingVectorSpec::Independent { q, n: n_law @ DistributionSpec::Zeta { s }, c } = cfg.model else {
        ctx.warnings.push("tail asymptotic skipped: it needs an independent model with zeta offspring".into());
        return Ok(());
    };
    let range = cfg.tail_range.unwrap_or((0, 100));
    let mut curves: Vec<(&str, TailAsymptotic)> = Vec::new();
    if let Some(coefficient) = asym.coefficient {
        curves.push(("printed", TailAsymptotic::with_coefficient(asym.alpha, coefficient, cfg.k)?));
    }
    if let Some(inputs) = asym.inputs {
        curves.push(("recomputed", TailAsymptotic::new(&inputs, cfg.k)?));
    }
    // tail index of P(N > x) is s - 1
    let model_alpha = s - 1.0;
    let derived = (|| -> Result<TailInputs> {
        Ok(TailInputs {
            mean_c: c.mean()?,
            mean_q: q.mean()?,
            rho_1: ctx.vector.rho(1.0)?,
            rho_alpha: ctx.vector.rho(model_alpha.max(1.0))?,
            alpha: model_alpha,
        })
    })();
    match derived.and_then(|inputs| Ok((inputs, TailAsymptotic::new(&inputs, cfg.k)?))) {
        Ok((inputs, tail)) => {
            ctx.put("asymptotic.model.alpha", fmt_f64(inputs.alpha));
            ctx.put("asymptotic.model.rho_1", fmt_f64(inputs.rho_1));
            ctx.put("asymptotic.model.rho_alpha", fmt_f64(inputs.rho_alpha));
            curves.push(("model", tail));
        }
        Err(e) => ctx.warnings.push(format!("model-derived tail coefficient unavailable: {e}")),
    }
    for (name, tail) in curves {
        ctx.put(format!("asymptotic.coefficient.{name}"), fmt_f64(tail.coefficient));
        let rows = g_k_curve(&tail, &n_law, range.0, range.1)?;
        let prov = ctx.prov.with("coefficient", fmt_f64(tail.coefficient)).with("source", name);
        let p = write_xy(&ctx.path(&format!("gk_{name}.csv")), &prov, "x,g_k", &rows)?;
        ctx.output(p);
    }
    Ok(())
}

/// Plug-in estimates of `E[h(R^(k))]` over `reps` independent bootstrap runs.
pub fn cmd_estimate(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let mut ctx = Context::new(cfg)?;
    let mut estimates = Vec::with_capacity(cfg.reps);
    for rep in 0..cfg.reps {
        let pool = ctx.bootstrap_pool(cfg.m, rep_seed(cfg.seed, rep))?;
        estimates.push(estimate_h(&pool, cfg.h));
    }
    let est = MeanEstimate::from_values(&estimates);
    let prov = ctx.prov.with_m(cfg.m).with("h", cfg.h).with("reps", cfg.reps);
    let p = write_values(&ctx.path("estimates.csv"), &prov, &estimates)?;
    ctx.output(p);
    ctx.put("h", cfg.h);
    ctx.put("h.within_guarantee", cfg.h.within_guarantee());
    if !cfg.h.within_guarantee() {
        ctx.put("h.label", "outside-guarantee");
    }
    ctx.put("estimate.mean", fmt_f64(est.mean));
    ctx.put("estimate.std_err", fmt_f64(est.std_err));
    let (lo, hi) = est.ci95();
    ctx.put("estimate.ci95_low", fmt_f64(lo));
    ctx.put("estimate.ci95_high", fmt_f64(hi));
    if let Some(path) = &cfg.reference_file {
        let oracle = oracle_from_file(path, cfg.h)?;
        ctx.put("oracle.file", path.display());
        ctx.put("oracle.value", fmt_f64(oracle.mean));
        ctx.put("oracle.std_err", fmt_f64(oracle.std_err));
        ctx.put("oracle.abs_error", fmt_f64((est.mean - oracle.mean).abs()));
        ctx.put("oracle.within_ci95", (lo..=hi).contains(&oracle.mean));
    }
    ctx.finish("estimate")
}

fn oracle_from_file(path: &Path, h: crate::metrics::HFunction) -> Result<MeanEstimate> {
    let values = read_values(path)?;
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    let mapped: Vec<f64> = values.iter().map(|&x| h.apply(x)).collect();
    let mut est = MeanEstimate::from_values(&mapped);
    est.mean = plug_in_average(&values, h);
    Ok(est)
}

/// Evaluates the convergence conditions only.
pub fn cmd_check(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let mut ctx = Context::new(cfg)?;
    if let Ok(en) = ctx.vector.mean_offspring() {
        ctx.put("mean_offspring", fmt_f64(en));
        if let Ok(nodes) = expected_node_count(&ctx.vector, cfg.k) {
            ctx.put("expected_nodes_per_exact_sample", fmt_f64(nodes));
        }
    }
    ctx.finish("check")
}

/// Tail probabilities with normal-approximation 95% intervals at the given points.
pub fn tail_with_ci(ecdf: &EmpiricalDistribution, xs: &[f64]) -> Vec<(f64, f64, (f64, f64))> {
    xs.iter()
        .map(|&x| {
            let p = ecdf.tail(x);
            (x, p, proportion_ci95(p, ecdf.len()))
        })
        .collect()
}
