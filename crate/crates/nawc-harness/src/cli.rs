//! Command-line surface of the `nawc` binary.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use log::error;

use crate::checks::{self, Module};
use crate::report::{EXIT_CONFIG, EXIT_PASS};
use crate::{emit_report, load_config, run, OutputFormat, RunOptions};

#[derive(Debug, Parser)]
#[command(name = "nawc", version, about = "Verification runner for non-abelian warped convolutions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every scenario in a TOML or JSON config.
    Run {
        config: PathBuf,
        /// Scenarios executed concurrently (0: one per core).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Comma-separated output formats.
        #[arg(long, value_delimiter = ',', default_value = "text,json,csv")]
        format: Vec<OutputFormat>,
        #[arg(long, default_value = "nawc-report")]
        out_dir: PathBuf,
        /// Replace the seed of every scenario.
        #[arg(long)]
        seed_override: Option<u64>,
        /// Stop scheduling checks after the first failure.
        #[arg(long)]
        fail_fast: bool,
    },
    /// List registered checks.
    ListChecks {
        /// Restrict to one module.
        #[arg(long)]
        module: Option<String>,
    },
    /// Show the anchor, tolerance and rationale of a check.
    Explain { check_id: String },
}

pub fn init_logging() {
    let env = env_logger::Env::new().filter_or("NAWC_LOG", "warn");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

/// Executes a parsed command and returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    match cli.command {
        Command::Run { config, jobs, format, out_dir, seed_override, fail_fast } => {
            let scenarios = match load_config(&config, seed_override) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_CONFIG;
                }
            };
            let report = run(&scenarios, RunOptions { jobs, fail_fast });
            if format.contains(&OutputFormat::Text) {
                print!("{}", report.text_table());
            }
            if let Err(e) = emit_report(&report, &format, &out_dir) {
                error!("writing reports to {}: {e}", out_dir.display());
                eprintln!("error: cannot write reports to {}: {e}", out_dir.display());
                return EXIT_CONFIG;
            }
            report.exit_code()
        }
        Command::ListChecks { module } => {
            let filter = match module.as_deref().map(|m| Module::parse(m).ok_or(m)) {
                None => None,
                Some(Ok(m)) => Some(m),
                Some(Err(m)) => {
                    eprintln!("error: unknown module {m:?}");
                    return EXIT_CONFIG;
                }
            };
            let width = checks::REGISTRY.iter().map(|s| s.id.len()).max().unwrap_or(0);
            for s in checks::REGISTRY.iter().filter(|s| filter.is_none_or(|m| s.module == m)) {
                println!("{:width$}  {:>8.1e}  {}", s.id, s.tolerance, s.anchor);
            }
            EXIT_PASS
        }
        Command::Explain { check_id } => match checks::find(&check_id) {
            Some(s) => {
                println!("{}\n  module:     {}\n  anchor:     {}\n  tolerance:  {:e} ({:?})\n  rationale:  {}", s.id, s.module.name(), s.anchor, s.tolerance, s.comparison, s.rationale);
                EXIT_PASS
            }
            None => {
                eprintln!("error: unknown check {check_id:?}; see `nawc list-checks`");
                EXIT_CONFIG
            }
        },
    }
}
