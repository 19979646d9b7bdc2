//! Configuration-driven verification runner: builds the curated test
//! family, executes the selected suites in canonical order, and emits
//! JSON-lines reports plus a CSV table and a run summary.

pub mod config;
pub mod family;
pub mod report;
pub mod suites;

use anyhow::Context;
use config::ExperimentConfig;
use report::{ReportRecord, RunSummary, SuiteSummary};
use std::path::Path;
use std::time::Instant;

/// Execute every selected suite and write the report files. Returns
/// the summary and all records.
pub fn run_config(
    cfg: &ExperimentConfig,
    out_dir: &Path,
) -> anyhow::Result<(RunSummary, Vec<ReportRecord>)> {
    cfg.validate()?;
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output dir {}", out_dir.display()))?;
    let mut all = Vec::new();
    let mut suites_summary = Vec::new();
    for suite in cfg.ordered_suites() {
        let start = Instant::now();
        let mut records = suites::run_suite(&suite, cfg)?;
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        let failed = records.iter().filter(|r| !r.pass).count();
        let worst = records
            .iter()
            .map(|r| if r.rel_err.is_finite() { r.rel_err } else { f64::MAX })
            .fold(0.0, f64::max);
        report::write_jsonl(&out_dir.join(format!("{suite}.jsonl")), &records)?;
        suites_summary.push(SuiteSummary {
            suite: suite.clone(),
            cases: records.len(),
            failed,
            worst_rel_err: worst,
            wall_ms,
        });
        all.append(&mut records);
    }
    let total_failed = all.iter().filter(|r| !r.pass).count();
    let summary = RunSummary {
        backend: cfg.backend.clone(),
        cutoff: cfg.cutoff,
        seed: cfg.seed,
        suites: suites_summary,
        total_cases: all.len(),
        total_failed,
        all_pass: total_failed == 0,
    };
    std::fs::write(
        out_dir.join("summary.json"),
        serde_json::to_string_pretty(&summary)?,
    )?;
    report::write_csv(&out_dir.join("all.csv"), &all)?;
    Ok((summary, all))
}

/// Configure the worker pool from `--jobs` / `MGHARM_JOBS`; a best-
/// effort global setting (later calls keep the first pool).
pub fn configure_jobs(jobs: Option<usize>) {
    let jobs = jobs.or_else(|| {
        std::env::var("MGHARM_JOBS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}
