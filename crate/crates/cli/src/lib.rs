//! Command-line driver for the capmono experiments.
//!
//! [`execute`] runs every cell of a config on a bounded worker pool and
//! assembles the results in plan order, so the artifacts do not depend on
//! the number of workers.

// `!(x >= 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod models;
pub mod output;
pub mod suites;

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::suites::{plan, run_cell, CellOutput, Finding};

pub const DEFAULT_OUTPUT_DIR: &str = "capmono-out";
pub const JOBS_ENV: &str = "CAPMONO_JOBS";

/// Exit status when every check passed.
pub const EXIT_OK: i32 = 0;
/// Exit status when some check failed.
pub const EXIT_FAIL: i32 = 1;
/// Exit status for config and usage errors.
pub const EXIT_USAGE: i32 = 2;

/// Worker count: the flag, then `CAPMONO_JOBS`, then the config, then the
/// machine.
pub fn resolve_jobs(flag: Option<usize>, env: Option<&str>, config: &ExperimentConfig) -> Result<usize, String> {
    if let Some(j) = flag {
        return if j == 0 { Err("--jobs must be at least 1".into()) } else { Ok(j) };
    }
    if let Some(text) = env {
        return match text.trim().parse::<usize>() {
            Ok(j) if j > 0 => Ok(j),
            _ => Err(format!("{JOBS_ENV} must be a positive integer, got `{text}`")),
        };
    }
    Ok(config
        .parallelism
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())))
}

pub fn resolve_output_dir(flag: Option<&Path>, config: &ExperimentConfig) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
}

/// Runs every cell of `config` on `jobs` workers and concatenates the
/// outputs in plan order.
pub fn execute(config: &ExperimentConfig, jobs: usize) -> CellOutput {
    let cells = plan(config);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().expect("worker pool");
    let outputs: Vec<CellOutput> = pool.install(|| cells.par_iter().map(|c| run_cell(c, config)).collect());
    let mut all = CellOutput::default();
    for out in outputs {
        all.rows.extend(out.rows);
        all.traces.extend(out.traces);
        all.findings.extend(out.findings);
    }
    all
}

/// The exit status implied by a list of checks.
pub fn exit_status(findings: &[Finding]) -> i32 {
    if findings.iter().any(|f| f.report.failed()) {
        EXIT_FAIL
    } else {
        EXIT_OK
    }
}
