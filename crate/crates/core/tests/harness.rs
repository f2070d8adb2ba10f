use std::collections::BTreeMap;

use lplab::harness::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

fn config(doc: Value) -> SweepConfig {
    SweepConfig::from_json(&doc.to_string(), &[]).unwrap()
}

fn curve(report: &VerificationReport, group: &str) -> Vec<(f64, f64)> {
    report.aggregates.iter().find(|a| a.group == group).unwrap().curve.clone()
}

#[test]
fn slope_regression_examples() {
    let exact: Vec<(f64, f64)> = (0..7).map(|k| (k as f64, 2f64.powf(-0.5 * k as f64))).collect();
    assert!((slope_regression(&exact).unwrap().slope + 0.5).abs() < 1e-12);
    let flat: Vec<(f64, f64)> = (0..5).map(|k| (k as f64, 4.2)).collect();
    assert!(slope_regression(&flat).unwrap().slope.abs() < 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let noisy: Vec<(f64, f64)> = (0..7)
        .map(|k| (k as f64, 3.0 * 2f64.powf(-0.5 * k as f64) * (1.0 + 0.01 * rng.random_range(-1.0..1.0))))
        .collect();
    assert!((slope_regression(&noisy).unwrap().slope + 0.5).abs() < 0.02);
    assert!(slope_regression(&exact[..2]).is_err());
    assert!(slope_regression(&[(0.0, 1.0), (1.0, 0.0), (2.0, 1.0)]).is_err());
}

#[test]
fn verdicts_come_from_the_records() {
    let mut cfg = SweepConfig::builtin(SuiteId::LocalHolder);
    cfg.tolerances.refinement = None;
    let none = BTreeMap::new;
    let prm = BTreeMap::new;
    let pool = Rule::Pool { max_over_median: 3.0 };
    let records = vec![
        Record::vanishing("g", "const", None, prm()),
        Record::measured("g", "a", None, prm(), 1.0, 1.0),
        Record::measured("g", "b", None, prm(), 2.0, 1.0),
        Record::measured("g", "c", None, prm(), 1.2, 1.0),
    ];
    let report = VerificationReport::assemble(&cfg, records.clone(), &none(), pool, vec![], 0.0);
    let agg = &report.aggregates[0];
    assert_eq!(agg.median, Some(1.2));
    assert_eq!(report.verdict, Verdict::Pass);
    assert_eq!(report.recompute(), (report.aggregates.clone(), report.verdict));

    let mut failing = records.clone();
    failing.push(Record::measured("g", "d", None, prm(), 9.0, 1.0));
    let report = VerificationReport::assemble(&cfg, failing, &none(), pool, vec![], 0.0);
    assert_eq!(report.verdict, Verdict::Fail);
    assert_eq!(report.verdict.exit_code(), 1);

    let mut skippy = records.clone();
    skippy.push(Record::measured("g", "e", None, prm(), 0.0, 0.0));
    skippy.push(Record::skip("g", "f", None, prm(), "degenerate"));
    let report = VerificationReport::assemble(&cfg, skippy, &none(), pool, vec![], 0.0);
    assert_eq!(report.skipped, 2);
    assert_eq!(report.verdict, Verdict::Inconclusive);

    let all_skip = vec![Record::skip("g", "a", None, prm(), "zero denominator")];
    let report = VerificationReport::assemble(&cfg, all_skip, &none(), pool, vec![], 0.0);
    assert_eq!(report.verdict, Verdict::Inconclusive);
    assert_eq!(report.verdict.exit_code(), 2);
}

#[test]
fn config_windows_are_enforced() {
    let ok = json!({ "suite": "cor-1.2" });
    assert!(SweepConfig::from_json(&ok.to_string(), &[]).is_ok());
    let bad = [
        json!({ "suite": "thm-9.9" }),
        json!({ "suite": "cor-1.2", "params": { "s": [1.2] } }),
        json!({ "suite": "cor-1.2", "params": { "pqr": [[2, 2, 2]] } }),
        json!({ "suite": "cor-1.2", "bogus": 1 }),
        json!({ "suite": "lem-4.1", "params": { "a": [1.0] } }),
        json!({ "suite": "lem-4.1", "params": { "a": [-0.5] } }),
        json!({ "suite": "thm-1.3", "grid": { "n": 1, "N": 1024, "L": 16 } }),
        json!({ "suite": "eq-971", "grid": { "n": 1, "N": 1024, "L": 16 } }),
    ];
    for doc in bad {
        assert!(SweepConfig::from_json(&doc.to_string(), &[]).is_err(), "{doc}");
    }
    let set = vec![("seed".to_string(), json!(11)), ("params.s".to_string(), json!([0.5]))];
    let cfg = SweepConfig::from_json(&ok.to_string(), &set).unwrap();
    assert_eq!((cfg.seed, cfg.params.s.clone()), (11, vec![0.5]));
}

/// Two offset Gaussians of width `w`.
fn gaussian_pair(w: f64) -> Value {
    json!([
        { "name": "left", "kind": "gaussian", "center": [-0.5 * w], "width": w },
        { "name": "right", "kind": "gaussian", "center": [0.5 * w], "width": w },
    ])
}

#[test]
fn commutator_curve_shifts_under_dilation() {
    // f(2·), g(2·) at band k behave as f, g at band k − 1; 1/p + 1/q = 1/r
    // cancels every other power of two.
    let base = |w: f64, ks: Vec<i32>| {
        config(json!({
            "suite": "cor-1.2",
            "grid": { "n": 1, "N": 2048, "L": 32 },
            "params": { "s": [0.5], "pqr": [[2, 2, 1]], "k": ks, "roughness": null },
            "family": gaussian_pair(w),
            "tolerances": { "max_over_median": 1e9, "slope": null },
        }))
    };
    let wide = run_suite(&base(1.0, vec![-3, -2, -1, 0])).unwrap();
    let narrow = run_suite(&base(0.5, vec![-2, -1, 0, 1])).unwrap();
    let group = "s=0.5 p=2 q=2 r=1";
    for ((k1, c1), (k2, c2)) in curve(&wide, group).into_iter().zip(curve(&narrow, group)) {
        assert_eq!(k2, k1 + 1.0);
        assert!((c2 / c1 - 1.0).abs() < 0.1, "k {k1}: {c1} vs {c2}");
    }
}

#[test]
fn shrinking_the_grid_keeps_the_records() {
    let run = |ks: Vec<i32>| {
        measure(&config(json!({
            "suite": "cor-1.2",
            "grid": { "n": 1, "N": 1024, "L": 16 },
            "params": { "s": [0.5], "pqr": [[2, 2, 1], [4, 4, 2]], "k": ks, "roughness": { "j0": -2, "j1": 2 } },
            "family": gaussian_pair(1.0),
        })))
        .unwrap()
        .records
    };
    let full = run(vec![-2, -1, 0, 1]);
    let part = run(vec![-1, 1]);
    for r in &part {
        assert!(full.contains(r), "{} {} {:?}", r.group, r.member, r.x);
    }
    assert_eq!(run(vec![-1, 1]), part);
}

#[test]
fn holder_suite_tolerates_high_modulation() {
    let mut cfg = config(json!({ "suite": "lem-3.1", "grid": { "n": 1, "N": 4096, "L": 16 }, "tolerances": { "refinement": null } }));
    let mut family = cfg.members();
    family.push(FamilyMember::new(
        "modulated-16",
        Generator::Gaussian { center: vec![0.0], width: 1.0, modulation: vec![16.0] },
    ));
    cfg.family = family;
    let report = run_suite(&cfg).unwrap();
    for agg in &report.aggregates {
        assert!(agg.max_over_median.unwrap() <= 3.0, "{}: {:?}", agg.group, agg.max_over_median);
    }
    assert_eq!(report.verdict, Verdict::Pass);
}

#[test]
fn sobolev_chain_is_dilation_covariant() {
    // The width-1/2 hat is 4·hat_1(2·), and both sides pick up 2^{-3/2}
    // when g becomes g(2·) in the plane.
    let cfg = config(json!({
        "suite": "eq-971",
        "family": [
            { "name": "hat-1", "kind": "mexican_hat", "width": 1 },
            { "name": "hat-0.5", "kind": "mexican_hat", "width": 0.5 },
        ],
    }));
    let records = measure(&cfg).unwrap().records;
    let (a, b) = (&records[0], &records[1]);
    let factor = 4.0 * 2f64.powf(-1.5);
    assert!((b.lhs / a.lhs / factor - 1.0).abs() < 0.1);
    assert!((b.rhs / a.rhs / factor - 1.0).abs() < 0.1);
}

#[test]
fn kernel_hypothesis_verdicts() {
    let run = |kernel: Value, s: f64, eps: f64| {
        run_suite(&config(json!({
            "suite": "kernel-hypothesis",
            "params": { "s": [s], "epsilon": [eps], "kernels": [kernel] },
        })))
        .unwrap()
        .verdict
    };
    assert_eq!(run(json!({ "kind": "littlewood", "k": 0 }), 0.5, 0.5), Verdict::Pass);
    assert_eq!(run(json!({ "kind": "power_tail", "decay": 0.3 }), 0.2, 0.2), Verdict::Fail);
    assert_eq!(run(json!({ "kind": "power_tail", "decay": 0.9 }), 0.2, 0.2), Verdict::Pass);
}

#[test]
fn measurements_are_deterministic() {
    let cfg = SweepConfig::builtin(SuiteId::Bernstein);
    let a = run_suite(&cfg).unwrap().without_metadata();
    let b = run_suite(&cfg).unwrap().without_metadata();
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
}

#[test]
fn refinement_is_recorded() {
    let report = run_suite(&SweepConfig::builtin(SuiteId::LocalHolder)).unwrap();
    assert!(report.records.iter().any(|r| r.level == 1));
    for agg in &report.aggregates {
        assert!(agg.refinement.unwrap() <= 0.1);
    }
}
