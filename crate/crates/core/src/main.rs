use std::path::PathBuf;
use std::process::ExitCode;

use branchsim::config::{preset, ExperimentConfig, RawConfig, PRESET_NAMES};
use branchsim::runner::{cmd_bootstrap, cmd_check, cmd_compare, cmd_estimate, cmd_naive, RunSummary};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "branchsim", version, about = "Bootstrap and exact simulation of branching linear recursions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Config file (`key = value`); applied on top of a preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_parser = clap::builder::PossibleValuesParser::new(PRESET_NAMES))]
    preset: Option<String>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Bootstrap pools of R^(k).
    Bootstrap,
    /// Exact samples from the weighted branching tree.
    Naive,
    /// Bootstrap versus naive reference in Wasserstein-1 distance.
    Compare,
    /// Plug-in estimates of E[h(R^(k))].
    Estimate,
    /// Convergence conditions only.
    Check,
}

fn load(cli: &Cli) -> branchsim::Result<ExperimentConfig> {
    let mut raw = match &cli.preset {
        Some(name) => preset(name)?,
        None => RawConfig::default(),
    };
    if let Some(path) = &cli.config {
        raw = raw.overlay(RawConfig::from_file(path)?);
    }
    if let Some(seed) = cli.seed {
        raw.set("seed", seed.to_string());
    }
    if let Some(out) = &cli.out {
        raw.set("out", out.display().to_string());
    }
    ExperimentConfig::from_raw(&raw)
}

fn run(cli: &Cli) -> branchsim::Result<RunSummary> {
    let cfg = load(cli)?;
    std::fs::create_dir_all(&cfg.out_dir)
        .map_err(|source| branchsim::Error::Io { path: cfg.out_dir.clone(), source })?;
    match cli.command {
        Command::Bootstrap => cmd_bootstrap(&cfg),
        Command::Naive => cmd_naive(&cfg),
        Command::Compare => cmd_compare(&cfg),
        Command::Estimate => cmd_estimate(&cfg),
        Command::Check => cmd_check(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(summary) => {
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
            let r = &summary.condition_report;
            println!("{}: conditions {} (beta = {})", summary.command, r.case.as_str(), r.beta);
            for (k, v) in &summary.entries {
                println!("  {k} = {v}");
            }
            println!(
                "  draws: {} vectors, {} q; elapsed {:.3}s",
                summary.counts.vector_draws,
                summary.counts.q_draws,
                summary.elapsed.as_secs_f64()
            );
            for p in &summary.outputs {
                println!("  wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
