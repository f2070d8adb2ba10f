//! Report files: `report.json`, `table.csv`, `plot-*.csv`, `summary.txt`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::harness::{Rule, VerificationReport};

const TABLE_COMMENT: &str = "# columns: group = aggregation group; member = test function; level = 0 on the \
configured grid, 1 on the refined grid; x = sweep abscissa (k, R, j) or empty; lhs, rhs = measured sides; \
ratio = lhs/rhs or empty when skipped; skipped = skip reason; params = JSON object of point parameters";

/// Writes every report file into `dir` (created if needed) and returns the
/// paths written.
pub fn emit_report(report: &VerificationReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(e).context(format!("output directory {}", dir.display())))?;
    let mut written = Vec::new();
    let mut put = |name: String, bytes: Vec<u8>| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, bytes).map_err(|e| Error::Io(e).context(format!("writing {}", path.display())))?;
        written.push(path);
        Ok(())
    };
    put("report.json".into(), report.to_json()?.into_bytes())?;
    put("table.csv".into(), table_csv(report)?)?;
    for agg in &report.aggregates {
        if agg.curve.is_empty() {
            continue;
        }
        let y = match agg.rule {
            Rule::TailGrowth { .. } => "weighted_mass",
            _ => "family_max_ratio",
        };
        let mut text = format!("# {} curve of group '{}'\nx,{y}\n", report.suite, agg.group);
        for (x, c) in &agg.curve {
            let _ = writeln!(text, "{x},{c}");
        }
        put(format!("plot-{}.csv", slug(&agg.group)), text.into_bytes())?;
    }
    put("plot-ratio-histogram.csv".into(), histogram_csv(report).into_bytes())?;
    put("summary.txt".into(), summary(report).into_bytes())?;
    Ok(written)
}

fn table_csv(report: &VerificationReport) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    writeln!(buf, "{TABLE_COMMENT}")?;
    let mut w = csv::Writer::from_writer(buf);
    let csv_err = |e: csv::Error| Error::InvalidParameter(format!("csv: {e}"));
    w.write_record(["group", "member", "level", "x", "lhs", "rhs", "ratio", "skipped", "params"]).map_err(csv_err)?;
    for r in &report.records {
        let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        w.write_record([
            r.group.clone(),
            r.member.clone(),
            r.level.to_string(),
            opt(r.x),
            r.lhs.to_string(),
            r.rhs.to_string(),
            opt(r.ratio),
            r.skipped.clone().unwrap_or_default(),
            serde_json::to_string(&r.params)?,
        ])
        .map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// Histogram of `log2 ratio` over every measured point, in unit bins.
fn histogram_csv(report: &VerificationReport) -> String {
    let logs: Vec<f64> = report
        .records
        .iter()
        .filter(|r| r.level == 0)
        .filter_map(|r| r.ratio)
        .filter(|c| *c > 0.0)
        .map(f64::log2)
        .collect();
    let mut text = String::from("# histogram of log2(ratio) over all measured points\nlog2_ratio_lo,log2_ratio_hi,count\n");
    if logs.is_empty() {
        return text;
    }
    let lo = logs.iter().copied().fold(f64::INFINITY, f64::min).floor() as i64;
    let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max).floor() as i64;
    for b in lo..=hi {
        let count = logs.iter().filter(|v| v.floor() as i64 == b).count();
        let _ = writeln!(text, "{b},{},{count}", b + 1);
    }
    text
}

fn summary(report: &VerificationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "suite {}: {}", report.suite, report.suite.describe());
    let g = report.config.grid;
    let _ = writeln!(s, "grid n={} N={} L={}  seed {}", g.n, g.samples, g.half_width, report.config.seed);
    let _ = writeln!(s, "verdict {}  ({} points, {} skipped)", report.verdict.as_str(), report.total, report.skipped);
    for a in &report.aggregates {
        let _ = write!(s, "  [{}] {}", a.verdict.as_str(), a.group);
        if let (Some(max), Some(med)) = (a.max, a.median) {
            let _ = write!(s, ": max {max:.4} median {med:.4}");
        }
        if let Some(fit) = a.slope {
            let _ = write!(s, " slope {:+.4} ± {:.4}", fit.slope, fit.stderr);
        }
        for c in &a.checks {
            let _ = write!(s, "; {} {:.4} (limit {})", c.name, c.value, c.threshold);
        }
        s.push('\n');
    }
    for n in &report.notes {
        let _ = writeln!(s, "note: {n}");
    }
    s
}

fn slug(group: &str) -> String {
    let mut out = String::new();
    for c in group.chars() {
        if c.is_ascii_alphanumeric() || c == '.' || c == '-' {
            out.push(c);
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slugs_are_file_safe() {
        assert_eq!(slug("s=0.5 p=inf q=2 r=2"), "s_0.5_p_inf_q_2_r_2");
        assert_eq!(slug("kernel P_0 s=0.5 eps=0.5"), "kernel_P_0_s_0.5_eps_0.5");
    }
}
