//! Sweep configuration: which estimate to run, on which grid, over which
//! parameter grids and test functions.
//!
//! A config on disk may be partial. [`SweepConfig::from_json`] overlays it on
//! the built-in default for its suite (objects merge key by key, arrays and
//! scalars replace), so `{"suite": "cor-1.2", "params": {"s": [0.5]}}` is a
//! complete config.

use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::realspace::PairSampling;

use super::family::{FamilyMember, TestFunctionFamily};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SuiteId {
    #[serde(rename = "thm-1.1")]
    KernelCommutator,
    #[serde(rename = "cor-1.2")]
    CommutatorDecay,
    #[serde(rename = "lem-3.1")]
    LocalHolder,
    #[serde(rename = "lem-3.2")]
    BumpCommutator,
    #[serde(rename = "lem-4.1")]
    WeightedBandSum,
    #[serde(rename = "thm-1.3")]
    Embedding,
    #[serde(rename = "cor-1.4")]
    DualEmbedding,
    #[serde(rename = "bernstein")]
    Bernstein,
    #[serde(rename = "eq-971")]
    SobolevChain,
    #[serde(rename = "kernel-hypothesis")]
    KernelHypothesis,
}

impl SuiteId {
    pub const ALL: [SuiteId; 10] = [
        SuiteId::KernelCommutator,
        SuiteId::CommutatorDecay,
        SuiteId::LocalHolder,
        SuiteId::BumpCommutator,
        SuiteId::WeightedBandSum,
        SuiteId::Embedding,
        SuiteId::DualEmbedding,
        SuiteId::Bernstein,
        SuiteId::SobolevChain,
        SuiteId::KernelHypothesis,
    ];

    pub fn id(self) -> &'static str {
        match self {
            SuiteId::KernelCommutator => "thm-1.1",
            SuiteId::CommutatorDecay => "cor-1.2",
            SuiteId::LocalHolder => "lem-3.1",
            SuiteId::BumpCommutator => "lem-3.2",
            SuiteId::WeightedBandSum => "lem-4.1",
            SuiteId::Embedding => "thm-1.3",
            SuiteId::DualEmbedding => "cor-1.4",
            SuiteId::Bernstein => "bernstein",
            SuiteId::SobolevChain => "eq-971",
            SuiteId::KernelHypothesis => "kernel-hypothesis",
        }
    }

    /// One-line statement of the measured inequality.
    pub fn describe(self) -> &'static str {
        match self {
            SuiteId::KernelCommutator => {
                "general-kernel commutator: 2^{sk}||sum_j H_j||_r <= C ||D^s f||_p ||g||_q with P_k split into annulus pieces"
            }
            SuiteId::CommutatorDecay => "commutator decay: ||[P_k,f]g||_r <= C 2^{-sk} ||D^s f||_p ||g||_q",
            SuiteId::LocalHolder => "pointwise Holder bound: |f(x)-f(y)| <= C |x-y|^s (M D^s f(x) + M D^s f(y))",
            SuiteId::BumpCommutator => "compact-kernel commutator: ||H||_r <= C R^s ||h||_1 ||D^s f||_p ||g||_q",
            SuiteId::WeightedBandSum => "weighted annulus sum: sum_m 2^{am}||[P_k, phi(2^-m .)]f||_2 <= C ||D^-a f||_2",
            SuiteId::Embedding => "weighted Besov embedding: ||f||_Y(gamma,d) <= C sum_m 2^{m/2}||phi(2^-m .) D^{gamma-d/2} f||_2",
            SuiteId::DualEmbedding => "dual embedding: sup_m 2^{-m/2}||phi(2^-m .) D^{gamma+d/2} f||_2 <= C ||f||_Y*(gamma,d)",
            SuiteId::Bernstein => "Bernstein: ||P_<=K f||_q <= C K^{n(1/p-1/q)} ||P_<=K f||_p",
            SuiteId::SobolevChain => "Sobolev chain: ||D^{-1/2} g||_2 <= C sum_m 2^{m/2}||phi(2^-m .) g||_2",
            SuiteId::KernelHypothesis => "kernel decay: annulus masses of |P| decay like 2^{-j(eps+s)}",
        }
    }

    /// Smallest dimension the estimate is stated for.
    pub fn min_dim(self) -> usize {
        match self {
            SuiteId::Embedding | SuiteId::DualEmbedding | SuiteId::SobolevChain => 2,
            _ => 1,
        }
    }

    /// Built-in default config.
    pub fn default_config_json(self) -> &'static str {
        match self {
            SuiteId::KernelCommutator => include_str!("../../configs/thm-1.1.json"),
            SuiteId::CommutatorDecay => include_str!("../../configs/cor-1.2.json"),
            SuiteId::LocalHolder => include_str!("../../configs/lem-3.1.json"),
            SuiteId::BumpCommutator => include_str!("../../configs/lem-3.2.json"),
            SuiteId::WeightedBandSum => include_str!("../../configs/lem-4.1.json"),
            SuiteId::Embedding => include_str!("../../configs/thm-1.3.json"),
            SuiteId::DualEmbedding => include_str!("../../configs/cor-1.4.json"),
            SuiteId::Bernstein => include_str!("../../configs/bernstein.json"),
            SuiteId::SobolevChain => include_str!("../../configs/eq-971.json"),
            SuiteId::KernelHypothesis => include_str!("../../configs/kernel-hypothesis.json"),
        }
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for SuiteId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteId::ALL.into_iter().find(|id| id.id() == s).ok_or_else(|| {
            let known: Vec<_> = SuiteId::ALL.iter().map(|id| id.id()).collect();
            Error::Config(format!("unknown suite '{s}' (known: {})", known.join(", ")))
        })
    }
}

/// A Lebesgue exponent in `[1, ∞]`; written as a number or `"inf"` in JSON.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Exponent(pub f64);

impl Exponent {
    pub fn reciprocal(self) -> f64 {
        1.0 / self.0
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let p = match Raw::deserialize(d)? {
            Raw::Num(p) => p,
            Raw::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "∞") => f64::INFINITY,
            Raw::Text(t) => return Err(de::Error::custom(format!("exponent '{t}' is neither a number nor \"inf\""))),
        };
        if p >= 1.0 {
            Ok(Exponent(p))
        } else {
            Err(de::Error::custom(format!("exponent {p} must lie in [1, inf]")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    #[serde(rename = "N")]
    pub samples: usize,
    #[serde(rename = "L")]
    pub half_width: f64,
}

impl GridConfig {
    pub fn spec(&self) -> Result<GridSpec> {
        GridSpec::new(self.n, self.samples, self.half_width)
    }
}

/// Kernel examined by the decay-hypothesis suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelChoice {
    /// The band kernel of `P_k`.
    Littlewood { k: i32 },
    /// `(1 + |x|)^{−n−decay}`.
    PowerTail { decay: f64 },
    /// `|x|^{−n+order}` on the unit ball, zero outside.
    TruncatedPower { order: f64 },
}

/// Lacunary roughening of `f` in the commutator suites: bands `j0..=j1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoughnessBands {
    pub j0: i32,
    pub j1: i32,
}

/// Parameter grids. Each suite reads the fields it needs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub k: Vec<i32>,
    pub s: Vec<f64>,
    pub a: Vec<f64>,
    pub gamma: Vec<f64>,
    pub d: Vec<f64>,
    pub pqr: Vec<[Exponent; 3]>,
    pub pq: Vec<[Exponent; 2]>,
    /// Physical annulus range `[m_min, m_max]`; the grid default when absent.
    pub m: Option<[i32; 2]>,
    pub radii: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub kernels: Vec<KernelChoice>,
    /// Test functions at band `k` are dilated by `base_dilation · 2^k`.
    pub base_dilation: Option<f64>,
    pub roughness: Option<RoughnessBands>,
    pub pair_sampling: Option<PairSampling>,
    pub cutoff_sharpness: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Largest allowed `max / median` of a constant curve or ratio pool.
    pub max_over_median: f64,
    /// Largest allowed `|slope|` of `log2 C(k)`; no slope check when absent.
    pub slope: Option<f64>,
    /// Largest allowed relative change of the family maximum when `N`
    /// doubles; the grid is not refined when absent.
    pub refinement: Option<f64>,
    /// Skipped fraction beyond which the verdict is INCONCLUSIVE.
    pub skip_fraction: f64,
    /// Relative boundary magnitude accepted for sampled kernels.
    pub kernel_boundary: f64,
    /// Largest growth per annulus of the weighted kernel masses.
    pub kernel_tail_growth: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            max_over_median: 3.0,
            slope: None,
            refinement: None,
            skip_fraction: 0.2,
            kernel_boundary: 1e-4,
            kernel_tail_growth: crate::spectral::KERNEL_TAIL_GROWTH_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub suite: SuiteId,
    pub grid: GridConfig,
    #[serde(default)]
    pub params: Params,
    /// Test functions; the default family for the grid dimension when empty.
    #[serde(default)]
    pub family: Vec<FamilyMember>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
}

impl SweepConfig {
    /// The built-in default config of a suite.
    pub fn builtin(suite: SuiteId) -> Self {
        serde_json::from_str(suite.default_config_json()).expect("built-in config parses")
    }

    /// Parses a (possibly partial) config document and overlays it on the
    /// suite default. Overrides `key.path=value` are applied on top.
    pub fn from_json(text: &str, overrides: &[(String, Value)]) -> Result<Self> {
        // Checked against the partial schema first so errors carry line numbers.
        serde_json::from_str::<PartialConfig>(text).map_err(|e| Error::Config(format!("{e}")))?;
        let doc: Value = serde_json::from_str(text).map_err(|e| Error::Config(format!("{e}")))?;
        Self::from_value(doc, overrides)
    }

    /// Default config of `suite` with overrides.
    pub fn for_suite(suite: SuiteId, overrides: &[(String, Value)]) -> Result<Self> {
        Self::from_value(serde_json::json!({ "suite": suite.id() }), overrides)
    }

    fn from_value(mut doc: Value, overrides: &[(String, Value)]) -> Result<Self> {
        for (path, value) in overrides {
            set_path(&mut doc, path, value.clone())?;
        }
        let suite: SuiteId = match doc.get("suite") {
            Some(Value::String(s)) => s.parse()?,
            Some(other) => return Err(Error::Config(format!("'suite' must be a string, got {other}"))),
            None => return Err(Error::Config("missing field 'suite'".into())),
        };
        let mut merged: Value = serde_json::from_str(suite.default_config_json())?;
        merge(&mut merged, doc);
        let config: SweepConfig = serde_json::from_value(merged).map_err(|e| Error::Config(format!("{e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn spec(&self) -> Result<GridSpec> {
        self.grid.spec()
    }

    /// The configured family, or the default one for the grid dimension.
    pub fn members(&self) -> Vec<FamilyMember> {
        if self.family.is_empty() {
            TestFunctionFamily::default_for(self.grid.n, self.seed).members
        } else {
            self.family.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(format!("{}: {msg}", self.suite)));
        let spec = self.spec().map_err(|e| Error::Config(format!("{}: grid: {e}", self.suite)))?;
        let n = spec.dim();
        if n < self.suite.min_dim() {
            return bad(format!("needs n >= {}, the grid has n = {n}", self.suite.min_dim()));
        }
        let p = &self.params;
        let uses_s = matches!(
            self.suite,
            SuiteId::KernelCommutator
                | SuiteId::CommutatorDecay
                | SuiteId::LocalHolder
                | SuiteId::BumpCommutator
                | SuiteId::KernelHypothesis
        );
        if uses_s {
            if p.s.is_empty() {
                return bad("params.s is empty".into());
            }
            if let Some(s) = p.s.iter().find(|s| !(**s > 0.0 && **s < 1.0)) {
                return bad(format!("s = {s} outside (0, 1)"));
            }
        }
        for [a, b, c] in &p.pqr {
            if ((a.reciprocal() + b.reciprocal()) - c.reciprocal()).abs() > 1e-12 {
                return bad(format!("exponents ({a}, {b}, {c}) violate 1/p + 1/q = 1/r"));
            }
        }
        if matches!(self.suite, SuiteId::KernelCommutator | SuiteId::CommutatorDecay | SuiteId::BumpCommutator)
            && p.pqr.is_empty()
        {
            return bad("params.pqr is empty".into());
        }
        if self.suite == SuiteId::WeightedBandSum {
            if p.a.is_empty() {
                return bad("params.a is empty".into());
            }
            let lo = -(n as f64) / 2.0;
            if let Some(a) = p.a.iter().find(|a| !(**a > lo && **a < 1.0)) {
                return bad(format!("a = {a} outside ({lo}, 1)"));
            }
        }
        if matches!(self.suite, SuiteId::Embedding | SuiteId::DualEmbedding) {
            if p.gamma.is_empty() || p.d.is_empty() {
                return bad("params.gamma and params.d must be non-empty".into());
            }
            if let Some(v) = p.gamma.iter().chain(&p.d).find(|v| !(**v >= 0.0)) {
                return bad(format!("gamma and d must be nonnegative, got {v}"));
            }
        }
        if self.suite == SuiteId::Bernstein && p.pq.is_empty() {
            return bad("params.pq is empty".into());
        }
        if matches!(self.suite, SuiteId::KernelCommutator | SuiteId::KernelHypothesis) {
            if p.epsilon.is_empty() {
                return bad("params.epsilon is empty".into());
            }
            if let Some(e) = p.epsilon.iter().find(|e| !(**e > 0.0)) {
                return bad(format!("epsilon = {e} must be positive"));
            }
        }
        if self.suite == SuiteId::BumpCommutator {
            if p.radii.is_empty() {
                return bad("params.radii is empty".into());
            }
            if let Some(r) = p.radii.iter().find(|r| !(**r > 0.0 && **r <= spec.half_width() / 2.0)) {
                return bad(format!("radius {r} must lie in (0, L/2]"));
            }
        }
        let needs_k = matches!(
            self.suite,
            SuiteId::KernelCommutator | SuiteId::CommutatorDecay | SuiteId::WeightedBandSum | SuiteId::Bernstein
        );
        if needs_k && p.k.is_empty() {
            return bad("params.k is empty".into());
        }
        if let Some(b) = p.base_dilation {
            if !(b > 0.0) {
                return bad(format!("base_dilation {b} must be positive"));
            }
        }
        if let Some(a) = p.cutoff_sharpness {
            if !(a > 0.0) {
                return bad(format!("cutoff_sharpness {a} must be positive"));
            }
        }
        if let Some([lo, hi]) = p.m {
            if lo > hi {
                return bad(format!("empty annulus range [{lo}, {hi}]"));
            }
        }
        let t = &self.tolerances;
        if !(t.max_over_median >= 1.0) {
            return bad("tolerances.max_over_median must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&t.skip_fraction) {
            return bad("tolerances.skip_fraction must lie in [0, 1]".into());
        }
        for member in &self.family {
            member.validate(n).map_err(|e| Error::Config(format!("{}: {e}", self.suite)))?;
        }
        Ok(())
    }

    /// The same config on the grid with twice the samples per axis.
    pub fn refined(&self) -> Self {
        let mut c = self.clone();
        c.grid.samples *= 2;
        c
    }
}

/// The on-disk schema with every top-level field optional.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(dead_code)]
struct PartialConfig {
    suite: Option<SuiteId>,
    grid: Option<PartialGrid>,
    params: Option<Params>,
    family: Option<Vec<FamilyMember>>,
    tolerances: Option<Tolerances>,
    seed: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(dead_code)]
struct PartialGrid {
    n: Option<usize>,
    #[serde(rename = "N")]
    samples: Option<usize>,
    #[serde(rename = "L")]
    half_width: Option<f64>,
}

/// Deep merge: objects merge by key, everything else replaces.
fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Sets `a.b.c` in a JSON document, creating objects along the way.
pub fn set_path(doc: &mut Value, path: &str, value: Value) -> Result<()> {
    let mut cur = doc;
    let parts: Vec<&str> = path.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("malformed override key '{path}'")));
    }
    for (i, part) in parts.iter().enumerate() {
        if !cur.is_object() {
            return Err(Error::Config(format!("override '{path}': '{}' is not an object", parts[..i].join("."))));
        }
        let map = cur.as_object_mut().expect("checked");
        if i + 1 == parts.len() {
            map.insert(part.to_string(), value);
            return Ok(());
        }
        cur = map.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    Ok(())
}

/// Parses `key=value`; the value is read as JSON when it parses, otherwise
/// as a string.
pub fn parse_override(text: &str) -> Result<(String, Value)> {
    let (key, raw) = text
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override '{text}' is not of the form key=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    Ok((key.trim().to_string(), value))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_config_is_valid() {
        for id in SuiteId::ALL {
            let c = SweepConfig::for_suite(id, &[]).unwrap();
            assert_eq!(c.suite, id);
        }
    }

    #[test]
    fn suite_ids_round_trip() {
        for id in SuiteId::ALL {
            assert_eq!(id.id().parse::<SuiteId>().unwrap(), id);
            assert_eq!(serde_json::to_string(&id).unwrap(), format!("\"{}\"", id.id()));
        }
        assert!("thm-9.9".parse::<SuiteId>().is_err());
    }

    #[test]
    fn partial_config_overlays_default() {
        let c = SweepConfig::from_json(r#"{"suite": "cor-1.2", "params": {"s": [0.5]}}"#, &[]).unwrap();
        assert_eq!(c.params.s, vec![0.5]);
        assert_eq!(c.params.k, SweepConfig::builtin(SuiteId::CommutatorDecay).params.k);
    }

    #[test]
    fn overrides_apply_before_validation() {
        let o = vec![parse_override("params.s=[0.25]").unwrap(), parse_override("grid.N=2048").unwrap()];
        let c = SweepConfig::for_suite(SuiteId::CommutatorDecay, &o).unwrap();
        assert_eq!(c.params.s, vec![0.25]);
        assert_eq!(c.grid.samples, 2048);
        let bad = vec![parse_override("params.s=[1.5]").unwrap()];
        assert!(SweepConfig::for_suite(SuiteId::CommutatorDecay, &bad).is_err());
    }

    #[test]
    fn holder_triple_checked() {
        let o = vec![parse_override(r#"params.pqr=[[2, 2, 2]]"#).unwrap()];
        assert!(SweepConfig::for_suite(SuiteId::CommutatorDecay, &o).is_err());
        let o = vec![parse_override(r#"params.pqr=[["inf", 2, 2]]"#).unwrap()];
        assert!(SweepConfig::for_suite(SuiteId::CommutatorDecay, &o).is_ok());
    }

    #[test]
    fn one_dimensional_embedding_rejected() {
        let o = vec![parse_override("grid.n=1").unwrap()];
        for id in [SuiteId::Embedding, SuiteId::DualEmbedding, SuiteId::SobolevChain] {
            let err = SweepConfig::for_suite(id, &o).unwrap_err().to_string();
            assert!(err.contains("n >= 2"), "{err}");
        }
    }

    #[test]
    fn weight_exponent_window() {
        let o = vec![parse_override("params.a=[1.0]").unwrap()];
        assert!(SweepConfig::for_suite(SuiteId::WeightedBandSum, &o).is_err());
        let o = vec![parse_override("params.a=[-0.5]").unwrap()];
        assert!(SweepConfig::for_suite(SuiteId::WeightedBandSum, &o).is_err());
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(SweepConfig::from_json(r#"{"suite": "cor-1.2", "params": {"bogus": 1}}"#, &[]).is_err());
        assert!(SweepConfig::from_json(r#"{"suite": "nope"}"#, &[]).is_err());
        assert!(SweepConfig::from_json(r#"{"params": {}}"#, &[]).is_err());
    }

    #[test]
    fn malformed_json_reports_line() {
        let err = SweepConfig::from_json("{\n  \"suite\": \"cor-1.2\",\n  oops\n}", &[]).unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
        let err = SweepConfig::from_json("{\n  \"suite\": \"cor-1.2\",\n  \"grid\": {\"M\": 3}\n}", &[])
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 3"), "{err}");
    }
}
