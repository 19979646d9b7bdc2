//! Small shared types for verification results and truncated series.

use serde::{Deserialize, Serialize};

/// Floor used in relative errors so that exact zeros compare cleanly.
pub const REL_ERR_FLOOR: f64 = 1e-300;

/// `|lhs - rhs| / max(|lhs|, 1e-300)`.
#[inline]
pub fn rel_err(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / lhs.abs().max(REL_ERR_FLOOR)
}

/// Two independently computed sides of an identity plus their relative
/// error.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CheckResult {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
}

impl CheckResult {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        CheckResult {
            lhs,
            rhs,
            rel_err: rel_err(lhs, rhs),
        }
    }
}

/// A partial series sum together with a rigorous bound on the dropped
/// tail. Series-evaluating operations return this instead of silently
/// truncating.
#[derive(Debug, Clone, Copy)]
pub struct Truncated<T> {
    pub value: T,
    pub tail_bound: f64,
}

impl<T> Truncated<T> {
    pub fn new(value: T, tail_bound: f64) -> Self {
        Truncated { value, tail_bound }
    }

    /// True when the tail bound is below `tol`.
    pub fn within(&self, tol: f64) -> bool {
        self.tail_bound <= tol
    }
}
