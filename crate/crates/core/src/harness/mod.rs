//! Verification harness: test-function families, sweep configuration,
//! suites and reports.

pub mod config;
pub mod family;
pub mod report;
pub mod suites;

pub use config::{Exponent, GridConfig, KernelChoice, Params, SuiteId, SweepConfig, Tolerances};
pub use family::{sample_member, FamilyMember, Generator, Roughness, Shaping, TestFunctionFamily};
pub use report::{Aggregate, Check, Record, Rule, Verdict, VerificationReport};
pub use suites::{measure, run_suite};

use crate::error::Result;
use crate::stats::{fit_line, LineFit};

/// Least-squares fit of `log2 value` against `k`.
pub fn slope_regression(series: &[(f64, f64)]) -> Result<LineFit> {
    if series.len() < 3 {
        return Err(crate::Error::InvalidParameter(format!(
            "slope regression needs at least 3 points, got {}",
            series.len()
        )));
    }
    if let Some(&(k, v)) = series.iter().find(|p| !(p.1 > 0.0) || !p.1.is_finite()) {
        return Err(crate::Error::InvalidParameter(format!("value {v} at k = {k} is not positive")));
    }
    let logs: Vec<(f64, f64)> = series.iter().map(|&(k, v)| (k, v.log2())).collect();
    fit_line(&logs)
}
