//! Machine-readable verification records: JSON-lines per suite, a CSV
//! table for plotting, and a run summary.

use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

/// Relative-error floor documented for the records:
/// `rel_err = |lhs - rhs| / max(|lhs|, 1e-300)`.
pub const REL_ERR_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRecord {
    pub suite: String,
    pub case: String,
    /// Input parameters of the case.
    pub inputs: serde_json::Value,
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
    /// Truncation tails attributed to the case (0 when exact).
    pub tail: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Wall time of the case; excluded from determinism comparisons.
    pub wall_ms: f64,
}

impl ReportRecord {
    pub fn new(
        suite: &str,
        case: &str,
        inputs: serde_json::Value,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
    ) -> Self {
        let rel_err = (lhs - rhs).abs() / lhs.abs().max(REL_ERR_FLOOR);
        ReportRecord {
            suite: suite.to_string(),
            case: case.to_string(),
            inputs,
            lhs,
            rhs,
            rel_err,
            tail: 0.0,
            tolerance,
            pass: rel_err <= tolerance,
            wall_ms: 0.0,
        }
    }

    /// Record judged on a direct quantity instead of a two-sided
    /// comparison (the quantity goes to `rel_err`).
    pub fn direct(
        suite: &str,
        case: &str,
        inputs: serde_json::Value,
        quantity: f64,
        tolerance: f64,
    ) -> Self {
        ReportRecord {
            suite: suite.to_string(),
            case: case.to_string(),
            inputs,
            lhs: quantity,
            rhs: 0.0,
            rel_err: quantity,
            tail: 0.0,
            tolerance,
            pass: quantity <= tolerance,
            wall_ms: 0.0,
        }
    }

    /// A boolean gate with a diagnostic detail value stored in `lhs`.
    pub fn gate(suite: &str, case: &str, inputs: serde_json::Value, ok: bool, detail: f64) -> Self {
        ReportRecord {
            suite: suite.to_string(),
            case: case.to_string(),
            inputs,
            lhs: detail,
            rhs: 0.0,
            rel_err: if ok { 0.0 } else { 1.0 },
            tail: 0.0,
            tolerance: 0.5,
            pass: ok,
            wall_ms: 0.0,
        }
    }

    /// A failed case describing a rejected precondition (guards,
    /// aliasing, truncation).
    pub fn rejection(suite: &str, case: &str, inputs: serde_json::Value, message: &str) -> Self {
        ReportRecord {
            suite: suite.to_string(),
            case: format!("{case} [{message}]"),
            inputs,
            lhs: f64::NAN,
            rhs: f64::NAN,
            rel_err: f64::INFINITY,
            tail: f64::INFINITY,
            tolerance: 0.0,
            pass: false,
            wall_ms: 0.0,
        }
    }

    pub fn with_tail(mut self, tail: f64) -> Self {
        self.tail = tail;
        self
    }

    /// Clone with the volatile timing field zeroed, for bit-exact
    /// comparisons between runs.
    pub fn stable(&self) -> ReportRecord {
        let mut r = self.clone();
        r.wall_ms = 0.0;
        r
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub cases: usize,
    pub failed: usize,
    pub worst_rel_err: f64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub backend: String,
    pub cutoff: u32,
    pub seed: u64,
    pub suites: Vec<SuiteSummary>,
    pub total_cases: usize,
    pub total_failed: usize,
    pub all_pass: bool,
}

/// Write one suite's records as JSON lines.
pub fn write_jsonl(path: &Path, records: &[ReportRecord]) -> anyhow::Result<()> {
    let mut file = std::fs::File::create(path)?;
    for r in records {
        serde_json::to_writer(&mut file, r)?;
        writeln!(file)?;
    }
    Ok(())
}

pub fn read_jsonl(path: &Path) -> anyhow::Result<Vec<ReportRecord>> {
    let raw = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for line in raw.lines() {
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(line)?);
    }
    Ok(out)
}

/// Flat CSV export of all records (documented column schema:
/// suite,case,lhs,rhs,rel_err,tail,tolerance,pass,wall_ms).
pub fn write_csv(path: &Path, records: &[ReportRecord]) -> anyhow::Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record([
        "suite",
        "case",
        "lhs",
        "rhs",
        "rel_err",
        "tail",
        "tolerance",
        "pass",
        "wall_ms",
    ])?;
    for r in records {
        writer.write_record([
            r.suite.clone(),
            r.case.clone(),
            format!("{:e}", r.lhs),
            format!("{:e}", r.rhs),
            format!("{:e}", r.rel_err),
            format!("{:e}", r.tail),
            format!("{:e}", r.tolerance),
            r.pass.to_string(),
            format!("{:.3}", r.wall_ms),
        ])?;
    }
    writer.flush()?;
    Ok(())
}
