//! Norm scales: `L^p`, dyadic-annulus `L²` pieces, the weighted Besov scale
//! `Y^{γ,d}` and its dual, the weighted Sobolev sum, `Lip(s)` and the Hölder
//! seminorm.
//!
//! Sums over the physical annuli `φ(2^{−m}·)` run over a finite range
//! `[m_min, m_max]`; what is left out is reported as a tail estimate next to
//! every value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, SampledField};
use crate::realspace::{pair_supremum, PairSampling};
use crate::spectral::{fractional_derivative, resolvable_range, CutoffProfile, LittlewoodPaley};

/// A norm value together with an estimate of what truncation discarded.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    pub value: f64,
    pub tail_estimate: f64,
}

impl NormValue {
    pub fn exact(value: f64) -> Self {
        Self { value, tail_estimate: 0.0 }
    }
}

/// Physical-space dyadic annuli `χ_m(x) = φ(2^{−m}|x|)` for `m` in
/// `[m_min, m_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DyadicAnnulusDecomposition {
    spec: GridSpec,
    cutoff: CutoffProfile,
    m_min: i32,
    m_max: i32,
}

impl DyadicAnnulusDecomposition {
    /// Default range `m_min = ⌈log2(2Δx)⌉`, `m_max = ⌊log2(L/2)⌋`.
    pub fn new(spec: &GridSpec, cutoff: CutoffProfile) -> Self {
        let (m_min, m_max) = Self::default_range(spec);
        Self { spec: *spec, cutoff, m_min, m_max }
    }

    pub fn with_range(spec: &GridSpec, cutoff: CutoffProfile, m_min: i32, m_max: i32) -> Result<Self> {
        if m_min > m_max {
            return Err(Error::param(format!("empty annulus range [{m_min}, {m_max}]")));
        }
        if 2f64.powi(m_max + 1) > spec.half_width() * (1.0 + 1e-12) {
            return Err(Error::Geometry(format!(
                "annulus m = {m_max} reaches |x| = {} beyond the box half width {}",
                2f64.powi(m_max + 1),
                spec.half_width()
            )));
        }
        Ok(Self { spec: *spec, cutoff, m_min, m_max })
    }

    pub fn default_range(spec: &GridSpec) -> (i32, i32) {
        let m_min = (2.0 * spec.spacing()).log2().ceil() as i32;
        let m_max = (spec.half_width() / 2.0).log2().floor() as i32;
        (m_min, m_max)
    }

    pub fn range(&self) -> (i32, i32) {
        (self.m_min, self.m_max)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn cutoff(&self) -> &CutoffProfile {
        &self.cutoff
    }

    /// `φ(2^{−m}|x|)` on the grid.
    pub fn annulus_mask(spec: &GridSpec, cutoff: &CutoffProfile, m: i32) -> SampledField {
        let scale = 2f64.powi(-m);
        let c = *cutoff;
        SampledField::constant(*spec, 1.0.into()).map_with_position(|x, _| {
            (c.phi(crate::grid::norm(x) * scale)).into()
        })
    }

    pub fn mask(&self, m: i32) -> SampledField {
        Self::annulus_mask(&self.spec, &self.cutoff, m)
    }

    /// `ψ(2^{−(m_min−1)}|x|)`: everything inside the smallest annulus.
    pub fn inner_cap(&self) -> SampledField {
        let scale = 2f64.powi(-(self.m_min - 1));
        let c = self.cutoff;
        SampledField::constant(self.spec, 1.0.into()).map_with_position(|x, _| c.psi(crate::grid::norm(x) * scale).into())
    }

    /// `1 − ψ(2^{−m_max}|x|)`: everything beyond the largest annulus.
    pub fn outer_remainder(&self) -> SampledField {
        let scale = 2f64.powi(-self.m_max);
        let c = self.cutoff;
        SampledField::constant(self.spec, 1.0.into())
            .map_with_position(|x, _| (1.0 - c.psi(crate::grid::norm(x) * scale)).into())
    }

    /// The physical partition `χ_0 = ψ(|x|)`, `χ_j = φ(2^{−j}|x|)` for
    /// `j = 1..=J`, with `J` large enough that the masks cover the box.
    pub fn partition_masks(&self) -> Vec<SampledField> {
        let reach = self.spec.half_width() * (self.spec.dim() as f64).sqrt();
        let j_top = reach.log2().ceil().max(0.0) as i32 + 1;
        let c = self.cutoff;
        (0..=j_top)
            .map(|j| {
                SampledField::constant(self.spec, 1.0.into()).map_with_position(|x, _| {
                    let r = crate::grid::norm(x);
                    if j == 0 { c.psi(r) } else { c.phi(r * 2f64.powi(-j)) }.into()
                })
            })
            .collect()
    }

    /// `‖χ_m F‖₂` for every `m` in range, plus the weighted contributions of
    /// the inner cap and outer remainder as the tail.
    fn annulus_profile(&self, f: &SampledField) -> Result<(Vec<(i32, f64)>, f64, f64)> {
        self.spec.ensure_same(f.spec())?;
        let spec = &self.spec;
        let dv = spec.cell_volume();
        let c = self.cutoff;
        let count = (self.m_max - self.m_min + 1) as usize;
        let mut sums = vec![0.0; count];
        let (mut inner, mut outer) = (0.0, 0.0);
        let inner_scale = 2f64.powi(-(self.m_min - 1));
        let outer_scale = 2f64.powi(-self.m_max);
        for (i, v) in f.values().iter().enumerate() {
            let e = v.norm_sqr();
            if e == 0.0 {
                continue;
            }
            let r = spec.radius(i);
            // Only the annuli whose support contains r contribute; none reach the origin.
            if r > 0.0 {
                let centre = r.log2().round() as i32;
                for m in [centre - 1, centre, centre + 1] {
                    if m >= self.m_min && m <= self.m_max {
                        let w = c.phi(r * 2f64.powi(-m));
                        sums[(m - self.m_min) as usize] += w * w * e;
                    }
                }
            }
            let wi = c.psi(r * inner_scale);
            inner += wi * wi * e;
            let wo = 1.0 - c.psi(r * outer_scale);
            outer += wo * wo * e;
        }
        let profile = sums
            .iter()
            .enumerate()
            .map(|(idx, s)| (self.m_min + idx as i32, (s * dv).sqrt()))
            .collect();
        Ok((profile, (inner * dv).sqrt(), (outer * dv).sqrt()))
    }

    /// `(Σ_m w(m) ‖χ_m F‖₂, tail)` for a weight `w(m)`; the tail treats the
    /// inner cap as annulus `m_min − 1` and the outer remainder as `m_max + 1`.
    pub fn weighted_sum(&self, f: &SampledField, weight: impl Fn(i32) -> f64) -> Result<NormValue> {
        let (profile, inner, outer) = self.annulus_profile(f)?;
        let value = profile.iter().map(|&(m, a)| weight(m) * a).sum();
        let tail = weight(self.m_min - 1) * inner + weight(self.m_max + 1) * outer;
        Ok(NormValue { value, tail_estimate: tail })
    }

    /// `(sup_m w(m) ‖χ_m F‖₂, tail)`.
    pub fn weighted_sup(&self, f: &SampledField, weight: impl Fn(i32) -> f64) -> Result<NormValue> {
        let (profile, inner, outer) = self.annulus_profile(f)?;
        let value = profile.iter().map(|&(m, a)| weight(m) * a).fold(0.0, f64::max);
        let tail = (weight(self.m_min - 1) * inner).max(weight(self.m_max + 1) * outer);
        Ok(NormValue { value, tail_estimate: tail })
    }

    /// `‖χ_m F‖₂` for every `m` in range.
    pub fn profile(&self, f: &SampledField) -> Result<Vec<(i32, f64)>> {
        Ok(self.annulus_profile(f)?.0)
    }
}

/// `L^p` exponent in `[1, ∞]`.
pub fn check_exponent(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::param(format!("L^p exponent {p} must be >= 1")))
    }
}

/// `(∫|f|^p)^{1/p}` by lattice quadrature; `p = ∞` is the lattice maximum.
pub fn lp_norm(f: &SampledField, p: f64) -> Result<f64> {
    check_exponent(p)?;
    if p.is_infinite() {
        return Ok(f.max_abs());
    }
    let dv = f.spec().cell_volume();
    let sum: f64 = if p == 2.0 {
        f.values().iter().map(|v| v.norm_sqr()).sum()
    } else if p == 1.0 {
        f.values().iter().map(|v| v.norm()).sum()
    } else {
        // Scale by the peak to avoid underflow for large p.
        let peak = f.max_abs();
        if peak == 0.0 {
            return Ok(0.0);
        }
        let s: f64 = f.values().iter().map(|v| (v.norm() / peak).powf(p)).sum();
        return Ok(peak * (s * dv).powf(1.0 / p));
    };
    Ok((sum * dv).powf(1.0 / p))
}

/// Evaluates the weighted norm scales of one field.
#[derive(Clone, Copy, Debug)]
pub struct NormScales {
    pub lp: LittlewoodPaley,
    pub annuli: DyadicAnnulusDecomposition,
}

impl NormScales {
    pub fn new(spec: &GridSpec, cutoff: CutoffProfile) -> Self {
        Self { lp: LittlewoodPaley::new(cutoff), annuli: DyadicAnnulusDecomposition::new(spec, cutoff) }
    }

    pub fn with_annuli(lp: LittlewoodPaley, annuli: DyadicAnnulusDecomposition) -> Self {
        Self { lp, annuli }
    }

    /// `‖φ(2^{−m}·) f‖₂`.
    pub fn annulus_l2(&self, f: &SampledField, m: i32) -> Result<f64> {
        let (m_min, m_max) = self.annulus_bounds(f.spec());
        if m < m_min || m > m_max {
            return Err(Error::Geometry(format!(
                "annulus m = {m} outside the box-resolved range [{m_min}, {m_max}]"
            )));
        }
        let mask = DyadicAnnulusDecomposition::annulus_mask(f.spec(), &self.annuli.cutoff, m);
        Ok(mask.mul(f)?.l2_norm())
    }

    fn annulus_bounds(&self, spec: &GridSpec) -> (i32, i32) {
        let lowest = spec.spacing().log2().floor() as i32;
        let highest = (spec.half_width() / 2.0).log2().floor() as i32;
        (lowest, highest)
    }

    /// `‖f‖_{Y_{d,k}} = 2^{−dk/2} Σ_m 2^{m/2} ‖φ(2^{−m}·) P_k f‖₂`.
    pub fn y_seminorm(&self, f: &SampledField, d: f64, k: i32) -> Result<NormValue> {
        let fk = self.lp.project_band(f, k)?;
        let pre = 2f64.powf(-d * k as f64 / 2.0);
        let v = self.annuli.weighted_sum(&fk, |m| 2f64.powf(m as f64 / 2.0))?;
        Ok(NormValue { value: pre * v.value, tail_estimate: pre * v.tail_estimate })
    }

    /// `‖f‖_{Y'_{d,k}} = 2^{dk/2} sup_m 2^{−m/2} ‖φ(2^{−m}·) P_k f‖₂`.
    pub fn y_dual_seminorm(&self, f: &SampledField, d: f64, k: i32) -> Result<NormValue> {
        let fk = self.lp.project_band(f, k)?;
        let pre = 2f64.powf(d * k as f64 / 2.0);
        let v = self.annuli.weighted_sup(&fk, |m| 2f64.powf(-m as f64 / 2.0))?;
        Ok(NormValue { value: pre * v.value, tail_estimate: pre * v.tail_estimate })
    }

    /// `‖f‖_{Y^{γ,d}} = (Σ_k 2^{2γk} ‖f‖²_{Y_{d,k}})^{1/2}` over the grid's
    /// resolvable bands. The tail adds the annulus tails and the spectral
    /// energy outside the resolved bands, in the same units.
    pub fn y_norm(&self, f: &SampledField, gamma: f64, d: f64) -> Result<NormValue> {
        let (k_min, k_max) = resolvable_range(f.spec());
        let mut sq = 0.0;
        let mut tail_sq = 0.0;
        for k in k_min..=k_max {
            let y = self.y_seminorm(f, d, k)?;
            let w = 2f64.powf(gamma * k as f64);
            sq += (w * y.value).powi(2);
            tail_sq += (w * y.tail_estimate).powi(2);
        }
        let value = sq.sqrt();
        let band_tail = crate::spectral::spectral_tail_fraction(f, 2f64.powi(k_max + 1)) * value;
        Ok(NormValue { value, tail_estimate: tail_sq.sqrt() + band_tail })
    }

    /// `‖f‖_{Ȳ^{γ,d}} = (Σ_k 2^{2γk} ‖f‖²_{Y'_{d,k}})^{1/2}`.
    pub fn y_dual_norm(&self, f: &SampledField, gamma: f64, d: f64) -> Result<NormValue> {
        let (k_min, k_max) = resolvable_range(f.spec());
        let mut sq = 0.0;
        let mut tail_sq = 0.0;
        for k in k_min..=k_max {
            let y = self.y_dual_seminorm(f, d, k)?;
            let w = 2f64.powf(gamma * k as f64);
            sq += (w * y.value).powi(2);
            tail_sq += (w * y.tail_estimate).powi(2);
        }
        Ok(NormValue { value: sq.sqrt(), tail_estimate: tail_sq.sqrt() })
    }

    /// Table `‖φ(2^{−m}·) P_k f‖₂` over resolvable `k` and the annulus range.
    pub fn band_annulus_table(&self, f: &SampledField) -> Result<BandAnnulusTable> {
        let (k_min, k_max) = resolvable_range(f.spec());
        let mut rows = Vec::new();
        for k in k_min..=k_max {
            let fk = self.lp.project_band(f, k)?;
            rows.push((k, self.annuli.profile(&fk)?));
        }
        Ok(BandAnnulusTable { rows })
    }

    /// `Σ_m 2^{m/2} ‖φ(2^{−m}·) D^{γ−d/2} f‖₂`.
    pub fn weighted_sobolev_sum(&self, f: &SampledField, gamma: f64, d: f64) -> Result<NormValue> {
        let g = fractional_derivative(f, gamma - d / 2.0)?;
        self.annuli.weighted_sum(&g, |m| 2f64.powf(m as f64 / 2.0))
    }

    /// `sup_m 2^{−m/2} ‖φ(2^{−m}·) D^{γ+d/2} f‖₂`.
    pub fn dual_sobolev_sup(&self, f: &SampledField, gamma: f64, d: f64) -> Result<NormValue> {
        let g = fractional_derivative(f, gamma + d / 2.0)?;
        self.annuli.weighted_sup(&g, |m| 2f64.powf(-m as f64 / 2.0))
    }

    /// `Lip(s)`: `sup_k 2^{sk} ‖P_k f‖_∞` over resolvable bands.
    pub fn lip_s_norm(&self, f: &SampledField, s: f64) -> Result<f64> {
        check_holder_order(s)?;
        let (k_min, k_max) = resolvable_range(f.spec());
        let mut best = 0.0f64;
        for k in k_min..=k_max {
            let fk = self.lp.project_band(f, k)?;
            best = best.max(2f64.powf(s * k as f64) * fk.max_abs());
        }
        Ok(best)
    }
}

/// `‖φ(2^{−m}·) P_k f‖₂` for every resolvable band and annulus; the Y-scale
/// norms can be read off it directly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandAnnulusTable {
    pub rows: Vec<(i32, Vec<(i32, f64)>)>,
}

impl BandAnnulusTable {
    /// Direct double sum `(Σ_k 2^{2γk} (2^{−dk/2} Σ_m 2^{m/2} a_{k,m})²)^{1/2}`.
    pub fn y_norm(&self, gamma: f64, d: f64) -> f64 {
        self.rows
            .iter()
            .map(|(k, row)| {
                let k = *k as f64;
                let inner: f64 = row.iter().map(|&(m, a)| 2f64.powf(m as f64 / 2.0) * a).sum();
                (2f64.powf(gamma * k) * 2f64.powf(-d * k / 2.0) * inner).powi(2)
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn y_dual_norm(&self, gamma: f64, d: f64) -> f64 {
        self.rows
            .iter()
            .map(|(k, row)| {
                let k = *k as f64;
                let inner = row.iter().map(|&(m, a)| 2f64.powf(-m as f64 / 2.0) * a).fold(0.0, f64::max);
                (2f64.powf(gamma * k) * 2f64.powf(d * k / 2.0) * inner).powi(2)
            })
            .sum::<f64>()
            .sqrt()
    }
}

pub(crate) fn check_holder_order(s: f64) -> Result<()> {
    if s > 0.0 && s < 1.0 {
        Ok(())
    } else {
        Err(Error::param(format!("order s = {s} must lie in (0, 1)")))
    }
}

/// Sampled `sup |f(x) − f(y)| / |x − y|^s` (periodic distance).
pub fn holder_seminorm(f: &SampledField, s: f64, sampling: &PairSampling) -> Result<f64> {
    check_holder_order(s)?;
    let spec = f.spec();
    let v = f.values();
    let (best, _) = pair_supremum(spec, sampling, |a, b| (v[a] - v[b]).norm() / spec.periodic_distance(a, b).powf(s));
    Ok(best)
}
