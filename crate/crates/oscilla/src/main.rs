use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use oscilla::commands::{self, Command, RunContext};
use oscilla::config::ExperimentConfig;

/// Numerical experiments for (v z')' + A v z = 0.
#[derive(Parser)]
#[command(name = "oscilla", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// TOML experiment config (optional for `verify`).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides `out` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized sweeps; overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for independent grid points.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("cannot configure the thread pool")?;
    }
    let cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None if commands::needs_config(cli.command) => anyhow::bail!("--config is required for this subcommand"),
        None => ExperimentConfig::default(),
    };
    let ctx = RunContext {
        out: cli
            .out
            .clone()
            .or_else(|| cfg.out.clone())
            .unwrap_or_else(|| PathBuf::from("out")),
        seed: cli.seed.or(cfg.seed).unwrap_or(0),
    };
    let outcome = commands::run(cli.command, &cfg, &ctx)?;
    for l in &outcome.lines {
        println!("{l}");
    }
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    Ok(outcome.success)
}
