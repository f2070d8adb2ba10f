//! Verification reports: per-point records, aggregates recomputed from
//! them, and the verdict.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::stats::{fit_line, median, LineFit};

use super::config::{SuiteId, SweepConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// One measured point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    /// Aggregation group, e.g. `s=0.5 p=2 q=2 r=1`.
    pub group: String,
    pub member: String,
    /// Sweep abscissa (`k`, `R`, `j`, ...) when the group is a curve.
    pub x: Option<f64>,
    /// 0 on the configured grid, 1 on the refined grid.
    pub level: u8,
    pub params: BTreeMap<String, Value>,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: Option<f64>,
    pub skipped: Option<String>,
}

impl Record {
    /// A measured point; a zero or non-finite denominator makes it a skip.
    pub fn measured(group: &str, member: &str, x: Option<f64>, params: BTreeMap<String, Value>, lhs: f64, rhs: f64) -> Self {
        let (ratio, skipped) = if !lhs.is_finite() || !rhs.is_finite() {
            (None, Some("non-finite measurement".to_string()))
        } else if rhs <= 0.0 {
            (None, Some("zero denominator".to_string()))
        } else {
            (Some(lhs / rhs), None)
        };
        Self {
            group: group.to_string(),
            member: member.to_string(),
            x,
            level: 0,
            params,
            lhs: if lhs.is_finite() { lhs } else { 0.0 },
            rhs: if rhs.is_finite() { rhs } else { 0.0 },
            ratio,
            skipped,
        }
    }

    /// A point where both sides vanish identically (a constant `f`, say):
    /// ratio 0, not a skip, and left out of the statistics.
    pub fn vanishing(group: &str, member: &str, x: Option<f64>, params: BTreeMap<String, Value>) -> Self {
        Self {
            group: group.to_string(),
            member: member.to_string(),
            x,
            level: 0,
            params,
            lhs: 0.0,
            rhs: 0.0,
            ratio: Some(0.0),
            skipped: None,
        }
    }

    pub fn skip(group: &str, member: &str, x: Option<f64>, params: BTreeMap<String, Value>, reason: impl Into<String>) -> Self {
        Self {
            group: group.to_string(),
            member: member.to_string(),
            x,
            level: 0,
            params,
            lhs: 0.0,
            rhs: 0.0,
            ratio: None,
            skipped: Some(reason.into()),
        }
    }
}

/// How a group's records become a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Rule {
    /// The constant at each abscissa is the maximum over the family; the
    /// curve must satisfy `max/median` and, if given, `|slope|` bounds.
    Curve { max_over_median: f64, slope: Option<f64> },
    /// All ratios of the group are pooled; `max/median` bound.
    Pool { max_over_median: f64 },
    /// The ratios form a decaying sequence in `x`; the least-squares growth
    /// of `log2 ratio` over the last `window` points above the mass floor
    /// must not exceed `growth`.
    TailGrowth { window: usize, growth: f64, floor: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self { name: name.to_string(), value, threshold, pass: value <= threshold }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub group: String,
    pub rule: Rule,
    pub count: usize,
    pub skipped: usize,
    pub max: Option<f64>,
    pub median: Option<f64>,
    pub min: Option<f64>,
    pub max_over_median: Option<f64>,
    pub slope: Option<LineFit>,
    /// Relative change of the family maximum under grid refinement.
    pub refinement: Option<f64>,
    /// `(x, C(x))` for curve groups.
    pub curve: Vec<(f64, f64)>,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    /// Seconds since the Unix epoch when the report was assembled.
    pub timestamp: u64,
    pub runtime_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: SuiteId,
    pub config: SweepConfig,
    pub records: Vec<Record>,
    pub aggregates: Vec<Aggregate>,
    pub verdict: Verdict,
    pub skipped: usize,
    pub total: usize,
    /// Truncation tails and other remarks.
    pub notes: Vec<String>,
    pub metadata: Metadata,
}

impl VerificationReport {
    /// Builds the aggregates and the verdict from the records alone.
    /// `rules` maps each group to its rule; groups without an entry use
    /// `default_rule`.
    pub fn assemble(
        config: &SweepConfig,
        records: Vec<Record>,
        rules: &BTreeMap<String, Rule>,
        default_rule: Rule,
        notes: Vec<String>,
        runtime_seconds: f64,
    ) -> Self {
        let mut groups: Vec<String> = Vec::new();
        for r in &records {
            if !groups.contains(&r.group) {
                groups.push(r.group.clone());
            }
        }
        let aggregates: Vec<Aggregate> = groups
            .iter()
            .map(|g| {
                let rule = rules.get(g).copied().unwrap_or(default_rule);
                aggregate(g, rule, &records, config.tolerances.refinement)
            })
            .collect();
        let total = records.iter().filter(|r| r.level == 0).count();
        let skipped = records.iter().filter(|r| r.level == 0 && r.skipped.is_some()).count();
        let verdict = overall(&aggregates, skipped, total, config.tolerances.skip_fraction);
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            suite: config.suite,
            config: config.clone(),
            records,
            aggregates,
            verdict,
            skipped,
            total,
            notes,
            metadata: Metadata { version: env!("CARGO_PKG_VERSION").to_string(), timestamp, runtime_seconds },
        }
    }

    /// Recomputes aggregates and verdict from the stored records.
    pub fn recompute(&self) -> (Vec<Aggregate>, Verdict) {
        let aggregates: Vec<Aggregate> = self
            .aggregates
            .iter()
            .map(|a| aggregate(&a.group, a.rule, &self.records, self.config.tolerances.refinement))
            .collect();
        let verdict = overall(&aggregates, self.skipped, self.total, self.config.tolerances.skip_fraction);
        (aggregates, verdict)
    }

    /// The report with the run-dependent metadata blanked, for comparing
    /// two runs.
    pub fn without_metadata(&self) -> Self {
        let mut r = self.clone();
        r.metadata.timestamp = 0;
        r.metadata.runtime_seconds = 0.0;
        r
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(Error::from)
    }
}

fn overall(aggregates: &[Aggregate], skipped: usize, total: usize, skip_cap: f64) -> Verdict {
    if aggregates.iter().any(|a| a.verdict == Verdict::Fail) {
        Verdict::Fail
    } else if total == 0
        || skipped as f64 > skip_cap * total as f64
        || aggregates.iter().any(|a| a.verdict == Verdict::Inconclusive)
    {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    }
}

/// Family maximum of the positive ratios at each abscissa, sorted by `x`.
fn family_curve(records: &[&Record]) -> Vec<(f64, f64)> {
    let mut curve: Vec<(f64, f64)> = Vec::new();
    for r in records {
        let (Some(x), Some(c)) = (r.x, r.ratio) else { continue };
        if c <= 0.0 {
            continue;
        }
        match curve.iter_mut().find(|p| p.0 == x) {
            Some(p) => p.1 = p.1.max(c),
            None => curve.push((x, c)),
        }
    }
    curve.sort_by(|a, b| a.0.total_cmp(&b.0));
    curve
}

fn aggregate(group: &str, rule: Rule, records: &[Record], refinement_tol: Option<f64>) -> Aggregate {
    let at = |level: u8| -> Vec<&Record> { records.iter().filter(|r| r.group == group && r.level == level).collect() };
    let base = at(0);
    let count = base.len();
    let skipped = base.iter().filter(|r| r.skipped.is_some()).count();
    let mut agg = Aggregate {
        group: group.to_string(),
        rule,
        count,
        skipped,
        max: None,
        median: None,
        min: None,
        max_over_median: None,
        slope: None,
        refinement: None,
        curve: Vec::new(),
        checks: Vec::new(),
        verdict: Verdict::Inconclusive,
    };
    // Zero ratios (e.g. a constant member) carry no information about the
    // constant and stay out of the statistics.
    let positive = |rs: &[&Record]| -> Vec<f64> { rs.iter().filter_map(|r| r.ratio).filter(|c| *c > 0.0).collect() };
    let values: Vec<f64> = match rule {
        Rule::Curve { .. } => {
            agg.curve = family_curve(&base);
            agg.curve.iter().map(|p| p.1).collect()
        }
        Rule::Pool { .. } => positive(&base),
        Rule::TailGrowth { .. } => {
            let mut pts: Vec<(f64, f64)> =
                base.iter().filter_map(|r| Some((r.x?, r.ratio?))).collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            agg.curve = pts.clone();
            pts.iter().map(|p| p.1).filter(|c| *c > 0.0).collect()
        }
    };
    if values.is_empty() {
        return agg;
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let med = median(&values).expect("non-empty");
    agg.max = Some(max);
    agg.min = Some(min);
    agg.median = Some(med);
    agg.max_over_median = Some(max / med);

    match rule {
        Rule::Curve { max_over_median, slope } => {
            agg.checks.push(Check::at_most("max/median", max / med, max_over_median));
            let logs: Vec<(f64, f64)> = agg.curve.iter().map(|&(x, c)| (x, c.log2())).collect();
            if logs.len() >= 3 {
                agg.slope = fit_line(&logs).ok();
            }
            if let Some(tol) = slope {
                match agg.slope {
                    Some(fit) => agg.checks.push(Check::at_most("|slope|", fit.slope.abs(), tol)),
                    None => return agg,
                }
            }
        }
        Rule::Pool { max_over_median } => {
            agg.checks.push(Check::at_most("max/median", max / med, max_over_median));
        }
        Rule::TailGrowth { window, growth, floor } => {
            let total: f64 = base.iter().map(|r| r.lhs).sum();
            let mut pts: Vec<(f64, f64, f64)> = base
                .iter()
                .filter_map(|r| Some((r.x?, r.ratio?, r.lhs)))
                .filter(|&(x, c, m)| x > 0.0 && c > 0.0 && m > floor * total)
                .collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            let tail: Vec<(f64, f64)> = pts.iter().rev().take(window).rev().map(|&(x, c, _)| (x, c.log2())).collect();
            let g = fit_line(&tail).map(|f| f.slope).unwrap_or(f64::NEG_INFINITY);
            agg.checks.push(Check::at_most("tail growth", g, growth));
        }
    }

    if let Some(tol) = refinement_tol {
        let fine = at(1);
        let fine_values: Vec<f64> = match rule {
            Rule::Curve { .. } => family_curve(&fine).iter().map(|p| p.1).collect(),
            _ => positive(&fine),
        };
        if let Some(fmax) = fine_values.iter().copied().reduce(f64::max) {
            let change = (fmax / max - 1.0).abs();
            agg.refinement = Some(change);
            agg.checks.push(Check::at_most("refinement", change, tol));
        } else if matches!(rule, Rule::Curve { .. } | Rule::Pool { .. }) {
            return agg;
        }
    }
    agg.verdict = if agg.checks.iter().all(|c| c.pass) { Verdict::Pass } else { Verdict::Fail };
    agg
}
