//! Scenario runner for the nawc engine: config loading, check execution,
//! and report emission behind the `nawc` command.

pub mod checks;
pub mod cli;
pub mod config;
pub mod report;
pub mod runner;

use std::sync::atomic::AtomicBool;
use std::time::Instant;

use rayon::prelude::*;

pub use config::{load_config, parse_config, ScenarioConfig};
pub use report::{emit_report, OutputFormat, Report};
pub use runner::{CheckRecord, Verdict};

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    /// Scenarios in flight at once; 0 means one per core.
    pub jobs: usize,
    pub fail_fast: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { jobs: 0, fail_fast: false }
    }
}

/// Runs every scenario and collects records in config order.
pub fn run(scenarios: &[ScenarioConfig], opts: RunOptions) -> Report {
    let start = Instant::now();
    let stop = AtomicBool::new(false);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.jobs).build().expect("thread pool");
    let outputs: Vec<_> = pool.install(|| scenarios.par_iter().map(|sc| runner::run_scenario(sc, &stop, opts.fail_fast)).collect());
    let mut records = Vec::new();
    let mut kernels = Vec::new();
    for out in outputs {
        records.extend(out.records);
        kernels.extend(out.kernels);
    }
    Report::new(scenarios, records, kernels, start.elapsed().as_secs_f64() * 1e3)
}
