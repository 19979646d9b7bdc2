use anyhow::Context;
use clap::{Parser, Subcommand};
use mgharm_cli::config::{ExperimentConfig, SUITE_ORDER};
use std::path::PathBuf;
use std::process::ExitCode;

/// Verification runner for harmonic analysis on motion groups.
#[derive(Parser)]
#[command(name = "mgharm", version, about)]
struct Cli {
    /// Worker threads (also MGHARM_JOBS).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the suites selected by a TOML config.
    Run {
        config: PathBuf,
        /// Override the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the known suites in execution order.
    ListSuites,
    /// Parse and validate a config without running anything.
    Validate { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    mgharm_cli::configure_jobs(cli.jobs);
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::ListSuites => {
            for s in SUITE_ORDER {
                println!("{s}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { config } => {
            ExperimentConfig::load(&config)?;
            println!("ok: {}", config.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let out_dir = out.unwrap_or_else(|| PathBuf::from(&cfg.output_dir));
            let (summary, records) =
                mgharm_cli::run_config(&cfg, &out_dir).context("running suites")?;
            for s in &summary.suites {
                println!(
                    "{:<18} {:>3} cases  {:>3} failed  worst rel err {:>10.3e}  {:>8.1} ms",
                    s.suite, s.cases, s.failed, s.worst_rel_err, s.wall_ms
                );
            }
            if summary.all_pass {
                println!(
                    "PASS: {} cases across {} suites",
                    summary.total_cases,
                    summary.suites.len()
                );
                Ok(ExitCode::SUCCESS)
            } else {
                for r in records.iter().filter(|r| !r.pass) {
                    println!(
                        "FAIL {}/{}: rel_err {:.3e} tolerance {:.3e}",
                        r.suite, r.case, r.rel_err, r.tolerance
                    );
                }
                println!(
                    "FAIL: {}/{} cases failed",
                    summary.total_failed, summary.total_cases
                );
                Ok(ExitCode::FAILURE)
            }
        }
    }
}
