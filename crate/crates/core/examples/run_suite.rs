//! Run a verification suite from its built-in config, with a couple of
//! overrides, and print the aggregates.

use lplab::harness::{run_suite, SuiteId, SweepConfig};
use serde_json::json;

fn main() -> lplab::Result<()> {
    let overrides = [("params.k".to_string(), json!([0, 1, 2, 3])), ("params.s".to_string(), json!([0.5]))];
    let config = SweepConfig::for_suite(SuiteId::CommutatorDecay, &overrides)?;
    let report = run_suite(&config)?;
    println!("{}: {}", report.suite, report.verdict.as_str());
    for agg in &report.aggregates {
        let slope = agg.slope.map(|f| format!("{:+.3}", f.slope)).unwrap_or_default();
        println!("  {:<24} max/median {:.3}  slope {slope}", agg.group, agg.max_over_median.unwrap_or(f64::NAN));
    }
    Ok(())
}
