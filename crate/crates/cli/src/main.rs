use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use entperc_cli::config;

#[derive(Parser)]
#[command(
    name = "entperc",
    version,
    about = "Entanglement percolation experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Experiment config file
    #[arg(long)]
    config: PathBuf,
    /// Master seed, overriding `experiment.seed`
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its tables and manifest
    Run {
        #[command(flatten)]
        common: Common,
        /// Output directory, overriding `experiment.output`
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores)
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check a config without running it
    Validate {
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> anyhow::Result<ExitCode> {
    match Cli::parse().command {
        Command::Validate { common } => {
            let violations = config::validate(&common.config, common.seed);
            if violations.is_empty() {
                println!("{}: ok", common.config.display());
                return Ok(ExitCode::SUCCESS);
            }
            for v in &violations {
                println!("{v}");
            }
            Ok(ExitCode::FAILURE)
        }
        Command::Run {
            common,
            out,
            threads,
        } => {
            if let Some(n) = threads {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .context("configuring the thread pool")?;
            }
            let cfg = config::load(&common.config, common.seed)?;
            let out_dir = out
                .or_else(|| cfg.output.clone())
                .unwrap_or_else(|| PathBuf::from("out"));
            let summary = entperc_cli::run(&cfg, &out_dir, Some(&common.config))
                .with_context(|| format!("running {}", common.config.display()))?;
            for name in &summary.outputs {
                println!("{}", summary.out_dir.join(name).display());
            }
            println!("{}", serde_json::to_string(&summary.results)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}
