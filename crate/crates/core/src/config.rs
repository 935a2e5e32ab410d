//! Flat `key = value` experiment configuration with dotted keys, plus the
//! built-in presets (which are written in the same format).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::asymptotics::TailInputs;
use crate::error::{Error, Result};
use crate::exact::DEFAULT_NODE_BUDGET;
use crate::metrics::HFunction;
use crate::model::{BranchingVectorSpec, DistributionSpec};

/// Default cap on expected vector draws for a naive run.
pub const DEFAULT_GLOBAL_BUDGET: f64 = 1e8;

const KNOWN_KEYS: &[&str] = &[
    "model.variant",
    "k",
    "m",
    "reps",
    "seed",
    "beta",
    "h",
    "node_budget",
    "global_budget",
    "streaming",
    "out",
    "compare.m",
    "reference.reps",
    "reference.file",
    "tail.x_min",
    "tail.x_max",
    "asymptotic.alpha",
    "asymptotic.coefficient",
    "asymptotic.mean_c",
    "asymptotic.mean_q",
    "asymptotic.rho_1",
    "asymptotic.rho_alpha",
    "bound.alpha",
    "bound.h_alpha",
];

const LAW_FIELDS: &[&str] = &["type", "value", "a", "b", "rate", "mean", "s", "p"];

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    value: String,
}

/// Parsed but uninterpreted `key = value` pairs.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, Entry>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| Error::config(line, content, "expected `key = value`"))?;
            let key = key.trim();
            let value = value.trim().trim_matches('"');
            if key.is_empty() {
                return Err(Error::config(line, key, "empty key"));
            }
            if !is_known_key(key) {
                return Err(Error::config(line, key, "unknown key"));
            }
            if entries.insert(key.to_string(), Entry { line, value: value.to_string() }).is_some() {
                return Err(Error::config(line, key, "duplicate key"));
            }
        }
        Ok(RawConfig { entries })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    /// Keys from `other` replace keys in `self`.
    pub fn overlay(mut self, other: RawConfig) -> Self {
        self.entries.extend(other.entries);
        self
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), Entry { line: 0, value: value.into() });
    }

    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    fn has_prefix(&self, prefix: &str) -> bool {
        self.entries.keys().any(|k| k.starts_with(prefix))
    }

    fn parse_value<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse()
                .map(Some)
                .map_err(|_| Error::config(e.line, key, format!("cannot parse `{}`", e.value))),
        }
    }

    fn require<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.parse_value(key)?.ok_or_else(|| Error::config(0, key, "missing required key"))
    }

    fn line_of(&self, key: &str) -> usize {
        self.get(key).map_or(0, |e| e.line)
    }

    fn law(&self, prefix: &str) -> Result<DistributionSpec> {
        let type_key = format!("{prefix}.type");
        let kind: String = self.require(&type_key)?;
        let p = |name: &str| self.require::<f64>(&format!("{prefix}.{name}"));
        let law = match kind.as_str() {
            "constant" => DistributionSpec::Constant { value: p("value")? },
            "uniform" => DistributionSpec::Uniform { a: p("a")?, b: p("b")? },
            "exponential" => DistributionSpec::Exponential { rate: p("rate")? },
            "poisson" => DistributionSpec::Poisson { mean: p("mean")? },
            "zeta" => DistributionSpec::Zeta { s: p("s")? },
            "bernoulli" => DistributionSpec::Bernoulli { p: p("p")? },
            other => {
                return Err(Error::config(self.line_of(&type_key), type_key, format!("unknown law `{other}`")))
            }
        };
        law.validate()
            .map_err(|e| Error::config(self.line_of(&type_key), prefix, e.to_string()))?;
        Ok(law)
    }

    fn model(&self) -> Result<BranchingVectorSpec> {
        let variant: String = self.parse_value("model.variant")?.unwrap_or_else(|| "independent".into());
        match variant.as_str() {
            "independent" => Ok(BranchingVectorSpec::Independent {
                q: self.law("model.q")?,
                n: self.law("model.n")?,
                c: self.law("model.c")?,
            }),
            "quicksort" => {
                if self.has_prefix("model.q.") || self.has_prefix("model.n.") || self.has_prefix("model.c.") {
                    return Err(Error::config(
                        self.line_of("model.variant"),
                        "model.variant",
                        "the quicksort vector is fully specified; remove model.q/n/c",
                    ));
                }
                Ok(BranchingVectorSpec::Quicksort)
            }
            "homogeneous" => {
                if self.has_prefix("model.q.") {
                    return Err(Error::config(
                        self.line_of("model.variant"),
                        "model.q",
                        "the homogeneous recursion has no additive term",
                    ));
                }
                Ok(BranchingVectorSpec::Homogeneous { n: self.law("model.n")?, c: self.law("model.c")? })
            }
            other => Err(Error::config(
                self.line_of("model.variant"),
                "model.variant",
                format!("unknown variant `{other}`"),
            )),
        }
    }

    fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        let Some(e) = self.get(key) else { return Ok(None) };
        e.value
            .split(',')
            .map(|v| v.trim().parse().map_err(|_| Error::config(e.line, key, format!("cannot parse `{}`", v.trim()))))
            .collect::<Result<Vec<T>>>()
            .map(Some)
    }
}

fn is_known_key(key: &str) -> bool {
    if KNOWN_KEYS.contains(&key) {
        return true;
    }
    ["model.q.", "model.n.", "model.c."]
        .iter()
        .any(|p| key.strip_prefix(p).is_some_and(|f| LAW_FIELDS.contains(&f)))
}

/// Optional overlay for the tail asymptotic.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticConfig {
    pub alpha: f64,
    /// A prefactor taken verbatim.
    pub coefficient: Option<f64>,
    /// Inputs for recomputing the prefactor by direct summation.
    pub inputs: Option<TailInputs>,
}

/// Constants for the pool-size bound in distance tables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConfig {
    pub alpha: f64,
    /// `sup_k E|R^(k)|^alpha`, supplied by the user.
    pub h_alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: BranchingVectorSpec,
    pub k: usize,
    pub m: usize,
    pub reps: usize,
    pub seed: u64,
    pub beta: f64,
    pub h: HFunction,
    pub node_budget: u64,
    pub global_budget: f64,
    pub streaming: bool,
    pub compare_m: Vec<usize>,
    pub reference_reps: usize,
    pub reference_file: Option<PathBuf>,
    pub tail_range: Option<(u64, u64)>,
    pub asymptotic: Option<AsymptoticConfig>,
    pub bound: Option<BoundConfig>,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let k: usize = raw.require("k")?;
        let m: usize = raw.parse_value("m")?.unwrap_or(1000);
        let reps: usize = raw.parse_value("reps")?.unwrap_or(1);
        let seed: u64 = raw.require("seed")?;
        let model = raw.model()?;
        if m == 0 {
            return Err(Error::config(raw.line_of("m"), "m", "must be >= 1"));
        }
        if reps == 0 {
            return Err(Error::config(raw.line_of("reps"), "reps", "must be >= 1"));
        }
        let h = match raw.get("h") {
            None => HFunction::Identity,
            Some(e) => e.value.parse().map_err(|err: Error| Error::config(e.line, "h", err.to_string()))?,
        };
        let compare_m = raw.list::<usize>("compare.m")?.unwrap_or_else(|| vec![m]);
        if compare_m.contains(&0) {
            return Err(Error::config(raw.line_of("compare.m"), "compare.m", "pool sizes must be >= 1"));
        }
        let tail_range = match (raw.parse_value::<u64>("tail.x_min")?, raw.parse_value::<u64>("tail.x_max")?) {
            (None, None) => None,
            (lo, Some(hi)) => {
                let lo = lo.unwrap_or(0);
                if lo > hi {
                    return Err(Error::config(raw.line_of("tail.x_min"), "tail.x_min", "must not exceed tail.x_max"));
                }
                Some((lo, hi))
            }
            (Some(_), None) => return Err(Error::config(raw.line_of("tail.x_min"), "tail.x_max", "missing")),
        };
        let asymptotic = match raw.parse_value::<f64>("asymptotic.alpha")? {
            None => None,
            Some(alpha) => {
                let inputs = match (
                    raw.parse_value("asymptotic.mean_c")?,
                    raw.parse_value("asymptotic.mean_q")?,
                    raw.parse_value("asymptotic.rho_1")?,
                    raw.parse_value("asymptotic.rho_alpha")?,
                ) {
                    (Some(mean_c), Some(mean_q), Some(rho_1), Some(rho_alpha)) => {
                        Some(TailInputs { mean_c, mean_q, rho_1, rho_alpha, alpha })
                    }
                    (None, None, None, None) => None,
                    _ => {
                        return Err(Error::config(
                            raw.line_of("asymptotic.alpha"),
                            "asymptotic",
                            "mean_c, mean_q, rho_1 and rho_alpha must be given together",
                        ))
                    }
                };
                Some(AsymptoticConfig { alpha, coefficient: raw.parse_value("asymptotic.coefficient")?, inputs })
            }
        };
        let bound = match (raw.parse_value("bound.alpha")?, raw.parse_value("bound.h_alpha")?) {
            (Some(alpha), Some(h_alpha)) => Some(BoundConfig { alpha, h_alpha }),
            (None, None) => None,
            _ => return Err(Error::config(raw.line_of("bound.alpha"), "bound", "alpha and h_alpha go together")),
        };
        Ok(ExperimentConfig {
            model,
            k,
            m,
            reps,
            seed,
            beta: raw.parse_value("beta")?.unwrap_or(2.0),
            h,
            node_budget: raw.parse_value("node_budget")?.unwrap_or(DEFAULT_NODE_BUDGET),
            global_budget: raw.parse_value("global_budget")?.unwrap_or(DEFAULT_GLOBAL_BUDGET),
            streaming: raw.parse_value("streaming")?.unwrap_or(false),
            compare_m,
            reference_reps: raw.parse_value("reference.reps")?.unwrap_or(1000),
            reference_file: raw.parse_value::<String>("reference.file")?.map(PathBuf::from),
            tail_range,
            asymptotic,
            bound,
            out_dir: raw.parse_value::<String>("out")?.map_or_else(|| PathBuf::from("out"), PathBuf::from),
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_raw(&RawConfig::parse(text)?)
    }
}

const EXAMPLE1_MODEL: &str = "\
model.variant = independent
model.q.type = uniform
model.q.a = 0
model.q.b = 1
model.n.type = poisson
model.n.mean = 3
model.c.type = uniform
model.c.a = 0
model.c.b = 0.2
";

/// Names accepted by `--preset`.
pub const PRESET_NAMES: &[&str] = &["example1", "example1-naive", "figure1", "figure2", "quicksort"];

/// Config text of a built-in preset.
pub fn preset_text(name: &str) -> Option<String> {
    let text = match name {
        "example1" => format!("{EXAMPLE1_MODEL}k = 10\nm = 1000\nreps = 1\nseed = 1\nh = identity\n"),
        "example1-naive" => format!("{EXAMPLE1_MODEL}k = 10\nreps = 1000\nseed = 1\n"),
        "figure1" => format!(
            "{EXAMPLE1_MODEL}k = 10\nm = 1000\nseed = 1\ncompare.m = 200, 1000\nreference.reps = 1000\n"
        ),
        "figure2" => "\
model.variant = independent
model.q.type = exponential
model.q.rate = 1
model.n.type = zeta
model.n.s = 2.5
model.c.type = uniform
model.c.a = 0
model.c.b = 0.5
k = 10
m = 10000
seed = 1
beta = 1.2
compare.m = 10000
reference.reps = 10000
tail.x_min = 0
tail.x_max = 100
asymptotic.alpha = 2.5
asymptotic.coefficient = 0.365
asymptotic.mean_c = 0.25
asymptotic.mean_q = 1
asymptotic.rho_1 = 0.49
asymptotic.rho_alpha = 0.07
"
        .to_string(),
        "quicksort" => "model.variant = quicksort\nk = 10\nm = 10000\nseed = 1\nbeta = 2\ncompare.m = 1000, 10000\nreference.reps = 10000\n"
            .to_string(),
        _ => return None,
    };
    Some(text)
}

pub fn preset(name: &str) -> Result<RawConfig> {
    let text = preset_text(name).ok_or_else(|| {
        Error::invalid("preset", format!("unknown preset `{name}`; expected one of {}", PRESET_NAMES.join(", ")))
    })?;
    RawConfig::parse(&text)
}
