//! Write the report files of a small sweep into a directory
//! (`target/emit-report-example` unless a path is given).

use std::path::PathBuf;

use lplab::cli::emit::emit_report;
use lplab::harness::{run_suite, SuiteId, SweepConfig};

fn main() -> lplab::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("target/emit-report-example"));
    let report = run_suite(&SweepConfig::builtin(SuiteId::Bernstein))?;
    for path in emit_report(&report, &dir)? {
        println!("{}", path.display());
    }
    Ok(())
}
