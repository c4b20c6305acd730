//! Pass/fail records shared by the certification harnesses.

use std::fmt::Write as _;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    /// Passes iff `max_residual <= tolerance`; NaN never passes.
    pub fn new(name: impl Into<String>, samples: usize, max_residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            samples,
            max_residual,
            tolerance,
            passed: max_residual <= tolerance,
        }
    }

    /// A check whose outcome is not a residual comparison.
    pub fn with_outcome(
        name: impl Into<String>,
        samples: usize,
        max_residual: f64,
        tolerance: f64,
        passed: bool,
    ) -> Self {
        Self {
            name: name.into(),
            samples,
            max_residual,
            tolerance,
            passed,
        }
    }
}

/// Plain-text table: check, samples, max residual, tolerance, verdict.
pub fn render_table(results: &[CheckResult]) -> String {
    let width = results
        .iter()
        .map(|r| r.name.len())
        .max()
        .unwrap_or(5)
        .max(5);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$}  {:>7}  {:>13}  {:>13}  result",
        "check", "samples", "max residual", "tolerance"
    );
    for r in results {
        let _ = writeln!(
            out,
            "{:<width$}  {:>7}  {:>13.6e}  {:>13.6e}  {}",
            r.name,
            r.samples,
            r.max_residual,
            r.tolerance,
            if r.passed { "pass" } else { "FAIL" }
        );
    }
    out
}

/// Largest value, with any NaN winning so that failures are not masked.
pub(crate) fn max_nan(acc: f64, x: f64) -> f64 {
    if x.is_nan() || acc.is_nan() {
        f64::NAN
    } else {
        acc.max(x)
    }
}
