//! The sweeps behind each suite id.
//!
//! Every suite produces per-point [`Record`]s and one aggregation [`Rule`]
//! per group; [`run_suite`] turns them into a [`VerificationReport`]. Where
//! an estimate is asserted "for all f", the empirical constant at a sweep
//! point is the maximum of the ratio over the family, and stability is
//! judged on that maximum.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::commutator::{annulus_decompose_kernel, dealiased_product, dealiased_product_unguarded, ALIASING_TOL, kernel_commutator, lp_commutator};
use crate::error::{Error, Result};
use crate::grid::{convolve, forward_transform, norm, GridSpec, SampledField, SpectralField, TabulatedMultiplier};
use crate::norms::{lp_norm, DyadicAnnulusDecomposition, NormScales};
use crate::realspace::{holder_ratio, MaximalOperator, PairSampling, RadiiPolicy};
use crate::spectral::{
    fractional_derivative, verify_kernel_hypothesis, CutoffProfile, KernelHypothesisReport, LittlewoodPaley,
    KERNEL_MASS_FLOOR,
};

use super::config::{Exponent, KernelChoice, SuiteId, SweepConfig};
use super::family::{sample_member, FamilyMember, Roughness, Shaping};
use super::report::{Record, Rule, VerificationReport};

/// Trailing annuli used to judge kernel decay.
const KERNEL_TAIL_WINDOW: usize = 3;

/// Records and per-group rules produced by one sweep.
#[derive(Debug, Default)]
pub struct Measurement {
    pub records: Vec<Record>,
    pub rules: BTreeMap<String, Rule>,
    pub notes: Vec<String>,
}

impl Measurement {
    fn extend(&mut self, other: Measurement) {
        self.records.extend(other.records);
        self.rules.extend(other.rules);
        self.notes.extend(other.notes);
    }
}

/// Runs the suite named in the config, refining the grid once when the
/// tolerances ask for a refinement check.
pub fn run_suite(config: &SweepConfig) -> Result<VerificationReport> {
    config.validate()?;
    let start = Instant::now();
    let mut m = measure(config)?;
    if config.tolerances.refinement.is_some() {
        let fine = measure(&config.refined())?;
        m.records.extend(fine.records.into_iter().map(|mut r| {
            r.level = 1;
            r
        }));
        m.notes.extend(fine.notes.into_iter().map(|n| format!("refined grid: {n}")));
    }
    let fallback = Rule::Pool { max_over_median: config.tolerances.max_over_median };
    Ok(VerificationReport::assemble(config, m.records, &m.rules, fallback, m.notes, start.elapsed().as_secs_f64()))
}

/// Records for the config's own grid.
pub fn measure(config: &SweepConfig) -> Result<Measurement> {
    match config.suite {
        SuiteId::KernelCommutator => estimate_commutator_constant(config, Route::KernelPieces),
        SuiteId::CommutatorDecay => estimate_commutator_constant(config, Route::Multiplier),
        SuiteId::LocalHolder => verify_local_holder(config),
        SuiteId::BumpCommutator => verify_bump_commutator(config),
        SuiteId::WeightedBandSum => verify_wbs(config),
        SuiteId::Embedding => verify_embedding(config),
        SuiteId::DualEmbedding => verify_dual_embedding(config),
        SuiteId::Bernstein => verify_bernstein(config),
        SuiteId::SobolevChain => verify_sobolev_chain(config),
        SuiteId::KernelHypothesis => verify_kernel_decay(config),
    }
    .map_err(|e| e.context(format!("suite {}", config.suite)))
}

fn params(entries: &[(&str, Value)]) -> BTreeMap<String, Value> {
    entries.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn exp_json(p: Exponent) -> Value {
    serde_json::to_value(p).expect("exponent serialises")
}

fn triple_label(s: f64, [p, q, r]: [Exponent; 3]) -> String {
    format!("s={s} p={p} q={q} r={r}")
}

fn littlewood_paley(config: &SweepConfig) -> Result<LittlewoodPaley> {
    let cutoff = match config.params.cutoff_sharpness {
        Some(a) => CutoffProfile::new(a)?,
        None => CutoffProfile::default(),
    };
    Ok(LittlewoodPaley::new(cutoff))
}

fn annuli(config: &SweepConfig, spec: &GridSpec, lp: &LittlewoodPaley) -> Result<DyadicAnnulusDecomposition> {
    match config.params.m {
        Some([lo, hi]) => DyadicAnnulusDecomposition::with_range(spec, lp.cutoff, lo, hi),
        None => Ok(DyadicAnnulusDecomposition::new(spec, lp.cutoff)),
    }
}

/// Runs `f` for every member in parallel, keeping family order, and tags
/// errors with the member name.
fn per_member<T: Send>(
    members: &[FamilyMember],
    f: impl Fn(usize, &FamilyMember) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    members
        .par_iter()
        .enumerate()
        .map(|(i, m)| f(i, m).map_err(|e| e.context(format!("member '{}'", m.name))))
        .collect()
}

fn need_family(members: &[FamilyMember]) -> Result<()> {
    if members.is_empty() {
        Err(Error::Config("the test-function family is empty".into()))
    } else {
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Route {
    /// `[P_k, f] g` through the band multiplier.
    Multiplier,
    /// `ℋ = Σ_j ℋ_j` with `ℋ_j` the commutator form of the rescaled annulus
    /// pieces of the band kernel.
    KernelPieces,
}

/// Commutator constants `C(k) = 2^{sk}‖[P_k,f]g‖_r / (‖|D|^s f‖_p ‖g‖_q)`.
///
/// `f` is the member times a lacunary series with Hölder exponent `s` over
/// the configured bands, so that `|D|^s f` carries weight at every band the
/// sweep touches; `g` is the next member of the family, unmodified. Through
/// the kernel route the measured quantity is `‖Σ_j ℋ_j‖_r`, which equals
/// `‖[P_k,f]g‖_r` up to sign, and the triangle bound `Σ_j ‖ℋ_j‖_r` is
/// recorded alongside.
fn estimate_commutator_constant(config: &SweepConfig, route: Route) -> Result<Measurement> {
    let spec = config.spec()?;
    let lp = littlewood_paley(config)?;
    let members = config.members();
    need_family(&members)?;
    let p = &config.params;
    let mut out = Measurement::default();

    // Rescaled kernel pieces, shared by every member.
    let pieces: Vec<(i32, Vec<SampledField>)> = if route == Route::KernelPieces {
        p.k.iter()
            .map(|&k| {
                let kernel = lp.lp_kernel(k, &spec, config.tolerances.kernel_boundary)?;
                Ok((k, annulus_decompose_kernel(&lp, &kernel, 2f64.powi(-k))?))
            })
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };

    let rows = per_member(&members, |i, member| {
        let g_member = &members[(i + 1) % members.len()];
        let g = sample_member(g_member, &spec, &Shaping::plain())?;
        let mut recs = Vec::new();
        for &s in &p.s {
            let shaping = Shaping {
                roughness: p.roughness.map(|b| Roughness { s, j0: b.j0, j1: b.j1, seed: config.seed.wrapping_add(i as u64) }),
                ..Shaping::plain()
            };
            let f = sample_member(member, &spec, &shaping)?;
            let ds_f = fractional_derivative(&f, s)?;
            let fg = match route {
                Route::KernelPieces => Some(dealiased_product(&f, &g)?),
                Route::Multiplier => None,
            };
            for (ki, &k) in p.k.iter().enumerate() {
                let (comm, parts) = match route {
                    Route::Multiplier => (lp_commutator(&lp, &f, &g, k)?, Vec::new()),
                    Route::KernelPieces => {
                        let fg = fg.as_ref().expect("computed for this route");
                        let mut total = SampledField::zeros(spec);
                        let mut parts = Vec::new();
                        // Far pieces are tiny, so their aliasing is judged
                        // against the whole product rather than their own size.
                        let (mut lost, mut scale) = (0.0, 0.0);
                        for q in &pieces[ki].1 {
                            let (prod, fraction) = dealiased_product_unguarded(&f, &convolve(q, &g)?)?;
                            let size = lp_norm(&prod, 2.0)?;
                            lost += fraction * size;
                            scale += size;
                            let h = prod.sub(&convolve(q, fg)?)?;
                            total = total.add(&h)?;
                            parts.push(h);
                        }
                        if lost > ALIASING_TOL * scale {
                            return Err(Error::Aliasing(format!(
                                "kernel pieces at k={k} lose {:.3e} of the product beyond Nyquist",
                                lost / scale
                            )));
                        }
                        (total, parts)
                    }
                };
                let gain = 2f64.powf(s * k as f64);
                for &pqr in &p.pqr {
                    let [pe, qe, re] = pqr;
                    let rhs = lp_norm(&ds_f, pe.0)? * lp_norm(&g, qe.0)?;
                    let lhs = gain * lp_norm(&comm, re.0)?;
                    let mut prm = params(&[
                        ("s", json!(s)),
                        ("p", exp_json(pe)),
                        ("q", exp_json(qe)),
                        ("r", exp_json(re)),
                        ("k", json!(k)),
                        ("g", json!(g_member.name)),
                    ]);
                    if route == Route::KernelPieces {
                        let tri: f64 = parts.iter().map(|h| lp_norm(h, re.0)).sum::<Result<f64>>()?;
                        prm.insert("triangle_sum".into(), json!(gain * tri));
                        prm.insert("pieces".into(), json!(parts.len()));
                    }
                    recs.push(Record::measured(&triple_label(s, pqr), &member.name, Some(k as f64), prm, lhs, rhs));
                }
            }
        }
        Ok(recs)
    })?;
    out.records = rows.into_iter().flatten().collect();
    let rule = Rule::Curve { max_over_median: config.tolerances.max_over_median, slope: config.tolerances.slope };
    for &s in &p.s {
        for &pqr in &p.pqr {
            out.rules.insert(triple_label(s, pqr), rule);
        }
    }

    if route == Route::KernelPieces {
        // The decay hypothesis on the unscaled band kernel.
        let kernel = lp.lp_kernel(0, &spec, config.tolerances.kernel_boundary)?;
        for &s in &p.s {
            for &eps in &p.epsilon {
                let rep = verify_kernel_hypothesis(&kernel, s, eps)?;
                out.extend(kernel_records(config, "P_0", &rep));
            }
        }
    }
    Ok(out)
}

/// Annulus-mass records of a decay-hypothesis check: the unit-ball mass at
/// `x = 0` and `m_j` against `2^{−j(ε+s)}` at `x = j`.
fn kernel_records(config: &SweepConfig, label: &str, rep: &KernelHypothesisReport) -> Measurement {
    let group = format!("kernel {label} s={} eps={}", rep.s, rep.epsilon);
    let base = |j: u32| params(&[("kernel", json!(label)), ("s", json!(rep.s)), ("epsilon", json!(rep.epsilon)), ("j", json!(j))]);
    let mut records = vec![Record::measured(&group, label, Some(0.0), base(0), rep.unit_ball_mass, 1.0)];
    for &(j, m) in &rep.annulus_masses {
        records.push(Record::measured(&group, label, Some(j as f64), base(j), m, 2f64.powf(-(j as f64) * (rep.epsilon + rep.s))));
    }
    let mut notes = Vec::new();
    if !rep.omitted.is_empty() {
        notes.push(format!("{group}: annuli {:?} do not fit the box and were omitted", rep.omitted));
    }
    let rule = Rule::TailGrowth {
        window: KERNEL_TAIL_WINDOW,
        growth: config.tolerances.kernel_tail_growth,
        floor: KERNEL_MASS_FLOOR,
    };
    Measurement { records, rules: BTreeMap::from([(group, rule)]), notes }
}

/// `sup |f(x) − f(y)| / (|x−y|^s (M D^s f(x) + M D^s f(y)))` per member.
/// Members with `f` constant contribute a zero ratio.
fn verify_local_holder(config: &SweepConfig) -> Result<Measurement> {
    let spec = config.spec()?;
    let members = config.members();
    need_family(&members)?;
    let maximal = MaximalOperator::new(&spec, &RadiiPolicy::default())?;
    let sampling = config.params.pair_sampling.clone().unwrap_or_else(PairSampling::default);
    let mut out = Measurement::default();
    let rows = per_member(&members, |_, member| {
        let f = sample_member(member, &spec, &Shaping::plain())?;
        let mut recs = Vec::new();
        for &s in &config.params.s {
            let hr = holder_ratio(&f, s, &maximal, &sampling)?;
            let mut prm = params(&[("s", json!(s))]);
            if let Some((a, b)) = hr.argmax {
                prm.insert("x".into(), json!(spec.position(a)[..spec.dim()].to_vec()));
                prm.insert("y".into(), json!(spec.position(b)[..spec.dim()].to_vec()));
            }
            let group = format!("s={s}");
            let rec = if hr.argmax.is_none() {
                Record::vanishing(&group, &member.name, None, prm)
            } else {
                Record::measured(&group, &member.name, None, prm, hr.numerator, hr.denominator)
            };
            recs.push(rec);
        }
        Ok(recs)
    })?;
    out.records = rows.into_iter().flatten().collect();
    let rule = Rule::Pool { max_over_median: config.tolerances.max_over_median };
    for &s in &config.params.s {
        out.rules.insert(format!("s={s}"), rule);
    }
    Ok(out)
}

/// `ℋ = ∫ h(y)(f(x) − f(x−y)) g(x−y) dy` for ball indicators `h` of radius
/// `R`, normalised by `R^s ‖h‖₁ ‖|D|^s f‖_p ‖g‖_q`.
fn verify_bump_commutator(config: &SweepConfig) -> Result<Measurement> {
    let spec = config.spec()?;
    let members = config.members();
    need_family(&members)?;
    let p = &config.params;
    let balls: Vec<(f64, SampledField, f64)> = p
        .radii
        .iter()
        .map(|&r| {
            let h = SampledField::from_real_fn(spec, |x| if norm(x) <= r { 1.0 } else { 0.0 })?;
            let mass = lp_norm(&h, 1.0)?;
            Ok((r, h, mass))
        })
        .collect::<Result<_>>()?;
    let mut out = Measurement::default();
    let rows = per_member(&members, |i, member| {
        let g_member = &members[(i + 1) % members.len()];
        let f = sample_member(member, &spec, &Shaping::plain())?;
        let g = sample_member(g_member, &spec, &Shaping::plain())?;
        let comms: Vec<SampledField> = balls.iter().map(|(_, h, _)| kernel_commutator(h, &f, &g)).collect::<Result<_>>()?;
        let mut recs = Vec::new();
        for &s in &p.s {
            let ds_f = fractional_derivative(&f, s)?;
            for &pqr in &p.pqr {
                let [pe, qe, re] = pqr;
                let base = lp_norm(&ds_f, pe.0)? * lp_norm(&g, qe.0)?;
                for ((radius, _, mass), comm) in balls.iter().zip(&comms) {
                    let prm = params(&[
                        ("s", json!(s)),
                        ("p", exp_json(pe)),
                        ("q", exp_json(qe)),
                        ("r", exp_json(re)),
                        ("R", json!(radius)),
                        ("g", json!(g_member.name)),
                        ("route", json!(if pe.0 == 1.0 { "young" } else { "maximal" })),
                    ]);
                    let lhs = lp_norm(comm, re.0)?;
                    let rhs = radius.powf(s) * mass * base;
                    recs.push(Record::measured(&triple_label(s, pqr), &member.name, Some(*radius), prm, lhs, rhs));
                }
            }
        }
        Ok(recs)
    })?;
    out.records = rows.into_iter().flatten().collect();
    let rule = Rule::Curve { max_over_median: config.tolerances.max_over_median, slope: None };
    for &s in &p.s {
        for &pqr in &p.pqr {
            out.rules.insert(triple_label(s, pqr), rule);
        }
    }
    Ok(out)
}

/// `Σ_m 2^{am} ‖[P_k, φ(2^{−m}·)] f‖₂ / ‖|D|^{−a} f‖₂` for `f = P_{≤k}` of a
/// mean-free member dilated by `base · 2^k`.
///
/// The inner cap `ψ(2^{1−m_min}|x|)` and the outer remainder
/// `1 − ψ(2^{−m_max}|x|)` enter as annuli `m_min − 1` and `m_max + 1`, so
/// the masks form a partition of unity on the box.
fn verify_wbs(config: &SweepConfig) -> Result<Measurement> {
    let spec = config.spec()?;
    let lp = littlewood_paley(config)?;
    let members = config.members();
    need_family(&members)?;
    let p = &config.params;
    let dec = annuli(config, &spec, &lp)?;
    let (m_min, m_max) = dec.range();
    let mut masks: Vec<(i32, SampledField)> = (m_min..=m_max).map(|m| (m, dec.mask(m))).collect();
    masks.push((m_min - 1, dec.inner_cap()));
    masks.push((m_max + 1, dec.outer_remainder()));
    let bands: Vec<(i32, TabulatedMultiplier, TabulatedMultiplier)> = p
        .k
        .iter()
        .map(|&k| {
            crate::spectral::check_band(&spec, k)?;
            Ok((
                k,
                TabulatedMultiplier::radial(&spec, |r| lp.below_symbol(k, r)),
                TabulatedMultiplier::radial(&spec, |r| lp.band_symbol(k, r)),
            ))
        })
        .collect::<Result<_>>()?;
    let base = p.base_dilation.unwrap_or(1.0);
    let mut out = Measurement::default();
    let rows = per_member(&members, |_, member| {
        let mut recs = Vec::new();
        for (k, below, band) in &bands {
            let dilation = base * 2f64.powi(*k);
            let raw = sample_member(member, &spec, &Shaping { dilation: Some(dilation), mean_free: true, roughness: None })?;
            let f = below.apply(&raw)?;
            let pk_f = band.apply(&f)?;
            let f_hat = forward_transform(&f);
            let comm: Vec<(i32, f64)> = masks
                .iter()
                .map(|(m, chi)| Ok((*m, band.apply(&chi.mul(&f)?)?.sub(&chi.mul(&pk_f)?)?.l2_norm())))
                .collect::<Result<_>>()?;
            for &a in &p.a {
                let w = |m: i32| 2f64.powf(a * m as f64);
                let lhs: f64 = comm.iter().map(|&(m, c)| w(m) * c).sum();
                let ends: f64 = comm.iter().filter(|(m, _)| *m < m_min || *m > m_max).map(|&(m, c)| w(m) * c).sum();
                let rhs = sobolev_l2(&f_hat, -a);
                let prm = params(&[
                    ("a", json!(a)),
                    ("k", json!(k)),
                    ("dilation", json!(dilation)),
                    ("cap_and_remainder_share", json!(if lhs > 0.0 { ends / lhs } else { 0.0 })),
                ]);
                recs.push(Record::measured(&format!("a={a}"), &member.name, Some(*k as f64), prm, lhs, rhs));
            }
        }
        Ok(recs)
    })?;
    out.records = rows.into_iter().flatten().collect();
    let rule = Rule::Curve { max_over_median: config.tolerances.max_over_median, slope: None };
    for &a in &p.a {
        out.rules.insert(format!("a={a}"), rule);
    }
    out.notes.push(format!("annuli m = {m_min}..{m_max}; inner cap and outer remainder counted as m = {} and {}", m_min - 1, m_max + 1));
    let share = out
        .records
        .iter()
        .filter_map(|r| r.params.get("cap_and_remainder_share").and_then(Value::as_f64))
        .fold(0.0, f64::max);
    out.notes.push(format!("largest share of the weighted sum carried by the cap and remainder: {share:.3e}"));
    Ok(out)
}

/// `‖D^σ f‖₂` straight from the spectrum, with the zero mode excised as in
/// [`fractional_derivative`] and Nyquist modes dropped.
fn sobolev_l2(f_hat: &SpectralField, sigma: f64) -> f64 {
    let spec = f_hat.spec();
    let sum: f64 = f_hat
        .coeffs()
        .iter()
        .enumerate()
        .filter(|&(i, _)| !spec.is_nyquist(i))
        .map(|(i, c)| {
            let r = spec.freq_norm(i);
            let w = if r == 0.0 { if sigma == 0.0 { 1.0 } else { 0.0 } } else { r.powf(sigma) };
            w * w * c.norm_sqr()
        })
        .sum();
    (sum * spec.freq_step().powi(spec.dim() as i32)).sqrt()
}

fn embedding_scales(config: &SweepConfig, spec: &GridSpec) -> Result<NormScales> {
    let lp = littlewood_paley(config)?;
    let dec = annuli(config, spec, &lp)?;
    Ok(NormScales::with_annuli(lp, dec))
}

/// `‖f‖_{Y^{γ,d}} / Σ_m 2^{m/2} ‖φ(2^{−m}·) D^{γ+d/2} f‖₂`, pooled over the
/// family and the `(γ, d)` grid.
fn verify_embedding(config: &SweepConfig) -> Result<Measurement> {
    embedding_sweep(config, false)
}

/// `sup_m 2^{−m/2} ‖φ(2^{−m}·) D^{γ+d/2} f‖₂ / ‖f‖_{Y*^{γ,d}}`, pooled.
fn verify_dual_embedding(config: &SweepConfig) -> Result<Measurement> {
    embedding_sweep(config, true)
}

fn embedding_sweep(config: &SweepConfig, dual: bool) -> Result<Measurement> {
    let spec = config.spec()?;
    let scales = embedding_scales(config, &spec)?;
    let members = config.members();
    need_family(&members)?;
    let p = &config.params;
    let group = if dual { "dual" } else { "primal" };
    let mut out = Measurement::default();
    let rows = per_member(&members, |_, member| {
        let f = sample_member(member, &spec, &Shaping::mean_free())?;
        let table = scales.band_annulus_table(&f)?;
        let mut recs = Vec::new();
        for &gamma in &p.gamma {
            for &d in &p.d {
                let (lhs, rhs, tail) = if dual {
                    let sup = scales.dual_sobolev_sup(&f, gamma, d)?;
                    (sup.value, table.y_dual_norm(gamma, d), sup.tail_estimate)
                } else {
                    let sum = scales.weighted_sobolev_sum(&f, gamma, d)?;
                    (table.y_norm(gamma, d), sum.value, sum.tail_estimate)
                };
                let prm = params(&[("gamma", json!(gamma)), ("d", json!(d)), ("sobolev_tail", json!(tail))]);
                recs.push(Record::measured(group, &member.name, None, prm, lhs, rhs));
            }
        }
        Ok(recs)
    })?;
    out.records = rows.into_iter().flatten().collect();
    out.rules.insert(group.into(), Rule::Pool { max_over_median: config.tolerances.max_over_median });
    let (m_min, m_max) = scales.annuli.range();
    out.notes.push(format!("annulus sums truncated to m = {m_min}..{m_max} on both sides of each ratio"));
    Ok(out)
}

/// `‖f‖_q / (K^{n(1/p−1/q)} ‖f‖_p)` for `f = P_{≤k}` of a member dilated
/// by `base · 2^k`, `K = 2^k`.
fn verify_bernstein(config: &SweepConfig) -> Result<Measurement> {
    let spec = config.spec()?;
    let lp = littlewood_paley(config)?;
    let members = config.members();
    need_family(&members)?;
    let p = &config.params;
    let base = p.base_dilation.unwrap_or(1.0);
    let n = spec.dim() as f64;
    let label = |[pe, qe]: [Exponent; 2]| format!("p={pe} q={qe}");
    let mut out = Measurement::default();
    let rows = per_member(&members, |_, member| {
        let mut recs = Vec::new();
        for &k in &p.k {
            let dilation = base * 2f64.powi(k);
            let raw = sample_member(member, &spec, &Shaping { dilation: Some(dilation), ..Shaping::plain() })?;
            let f = lp.project_below(&raw, k)?;
            let big_k = 2f64.powi(k);
            for &pq in &p.pq {
                let [pe, qe] = pq;
                let lhs = lp_norm(&f, qe.0)?;
                let rhs = big_k.powf(n * (pe.reciprocal() - qe.reciprocal())) * lp_norm(&f, pe.0)?;
                let prm = params(&[("p", exp_json(pe)), ("q", exp_json(qe)), ("k", json!(k)), ("K", json!(big_k))]);
                recs.push(Record::measured(&label(pq), &member.name, Some(k as f64), prm, lhs, rhs));
            }
        }
        Ok(recs)
    })?;
    out.records = rows.into_iter().flatten().collect();
    let rule = Rule::Curve { max_over_median: config.tolerances.max_over_median, slope: None };
    for &pq in &p.pq {
        out.rules.insert(label(pq), rule);
    }
    Ok(out)
}

/// `‖|D|^{−1/2} g‖₂ / Σ_m 2^{m/2} ‖φ(2^{−m}·) g‖₂` for mean-free members.
/// The left side is untruncated, so the right side includes the inner cap
/// and outer remainder as annuli `m_min − 1` and `m_max + 1`.
fn verify_sobolev_chain(config: &SweepConfig) -> Result<Measurement> {
    let spec = config.spec()?;
    let lp = littlewood_paley(config)?;
    let dec = annuli(config, &spec, &lp)?;
    let members = config.members();
    need_family(&members)?;
    let mut out = Measurement::default();
    let rows = per_member(&members, |_, member| {
        let g = sample_member(member, &spec, &Shaping::mean_free())?;
        let lhs = fractional_derivative(&g, -0.5)?.l2_norm();
        let sum = dec.weighted_sum(&g, |m| 2f64.powf(m as f64 / 2.0))?;
        let rhs = sum.value + sum.tail_estimate;
        let share = if rhs > 0.0 { sum.tail_estimate / rhs } else { 0.0 };
        let prm = params(&[("cap_and_remainder_share", json!(share))]);
        Ok(Record::measured("chain", &member.name, None, prm, lhs, rhs))
    })?;
    out.records = rows;
    out.rules.insert("chain".into(), Rule::Pool { max_over_median: config.tolerances.max_over_median });
    let (m_min, m_max) = dec.range();
    out.notes.push(format!("annuli m = {m_min}..{m_max} plus cap and remainder"));
    Ok(out)
}

/// Samples a kernel for the decay-hypothesis suite.
pub fn sample_kernel(choice: &KernelChoice, spec: &GridSpec, lp: &LittlewoodPaley, boundary_tol: f64) -> Result<SampledField> {
    let n = spec.dim() as f64;
    match *choice {
        KernelChoice::Littlewood { k } => lp.lp_kernel(k, spec, boundary_tol),
        KernelChoice::PowerTail { decay } => {
            if !(decay > 0.0) {
                return Err(Error::Config(format!("power_tail decay {decay} must be positive")));
            }
            SampledField::from_real_fn(*spec, |x| (1.0 + norm(x)).powf(-n - decay))
        }
        KernelChoice::TruncatedPower { order } => {
            if !(order > 0.0) {
                return Err(Error::Config(format!("truncated_power order {order} must be positive")));
            }
            // The origin cell carries the mean of |x|^{order−n} over the ball
            // of the cell's volume.
            let ball = std::f64::consts::PI.powf(n / 2.0) / statrs::function::gamma::gamma(n / 2.0 + 1.0);
            let rho = (spec.cell_volume() / ball).powf(1.0 / n);
            let origin = (n / order) * rho.powf(order - n);
            SampledField::from_real_fn(*spec, |x| {
                let r = norm(x);
                if r == 0.0 {
                    origin
                } else if r <= 1.0 {
                    r.powf(order - n)
                } else {
                    0.0
                }
            })
        }
    }
}

fn kernel_label(choice: &KernelChoice) -> String {
    match choice {
        KernelChoice::Littlewood { k } => format!("P_{k}"),
        KernelChoice::PowerTail { decay } => format!("power_tail({decay})"),
        KernelChoice::TruncatedPower { order } => format!("truncated_power({order})"),
    }
}

/// Annulus masses of each configured kernel against `2^{−j(ε+s)}`.
fn verify_kernel_decay(config: &SweepConfig) -> Result<Measurement> {
    let spec = config.spec()?;
    let lp = littlewood_paley(config)?;
    let p = &config.params;
    if p.kernels.is_empty() {
        return Err(Error::Config("params.kernels is empty".into()));
    }
    let mut out = Measurement::default();
    for choice in &p.kernels {
        let label = kernel_label(choice);
        let kernel = sample_kernel(choice, &spec, &lp, config.tolerances.kernel_boundary)
            .map_err(|e| e.context(format!("kernel {label}")))?;
        for &s in &p.s {
            for &eps in &p.epsilon {
                let rep = verify_kernel_hypothesis(&kernel, s, eps)?;
                out.extend(kernel_records(config, &label, &rep));
            }
        }
    }
    Ok(out)
}
