//! Dyadic frequency localisation: the cutoff pair `ψ`, `φ(t) = ψ(t) − ψ(2t)`,
//! the Littlewood-Paley projections built from them, and fractional
//! derivatives `|D|^s`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{apply_radial_multiplier, forward_transform, inverse_transform, GridSpec, SampledField, SpectralField};

/// Smooth radial cutoff: `ψ = 1` on `[0, 1]`, `ψ = 0` on `[2, ∞)`, strictly
/// decreasing in between.
///
/// The transition is `ψ(t) = S(2 − t)` with the normalised smooth step
/// `S(u) = B(u) / (B(u) + B(1 − u))`, `B(u) = exp(−a/u)` for `u > 0`, where `a`
/// is the sharpness. All derivatives vanish at both ends of the transition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffProfile {
    sharpness: f64,
}

impl Default for CutoffProfile {
    fn default() -> Self {
        Self { sharpness: 1.0 }
    }
}

impl CutoffProfile {
    pub fn new(sharpness: f64) -> Result<Self> {
        if !(sharpness.is_finite() && sharpness > 0.0) {
            return Err(Error::param(format!("cutoff sharpness must be positive, got {sharpness}")));
        }
        Ok(Self { sharpness })
    }

    pub fn sharpness(&self) -> f64 {
        self.sharpness
    }

    fn bump(&self, u: f64) -> f64 {
        if u <= 0.0 {
            0.0
        } else {
            (-self.sharpness / u).exp()
        }
    }

    fn smooth_step(&self, u: f64) -> f64 {
        let a = self.bump(u);
        let b = self.bump(1.0 - u);
        a / (a + b)
    }

    pub fn psi(&self, t: f64) -> f64 {
        let t = t.abs();
        if t <= 1.0 {
            1.0
        } else if t >= 2.0 {
            0.0
        } else {
            self.smooth_step(2.0 - t)
        }
    }

    pub fn phi(&self, t: f64) -> f64 {
        self.psi(t) - self.psi(2.0 * t)
    }
}

pub fn build_cutoff(sharpness: f64) -> Result<CutoffProfile> {
    CutoffProfile::new(sharpness)
}

/// A dyadic frequency scale `k`, optionally with a window width `N` for the
/// range operators `f_{k−N<·<k+N}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BandIndex {
    pub k: i32,
    pub width: Option<u32>,
}

impl BandIndex {
    pub fn new(k: i32) -> Self {
        Self { k, width: None }
    }

    pub fn with_width(k: i32, width: u32) -> Self {
        Self { k, width: Some(width) }
    }
}

impl From<i32> for BandIndex {
    fn from(k: i32) -> Self {
        BandIndex::new(k)
    }
}

/// Range of dyadic scales a grid resolves: `k_min = ⌈log2(4Δξ)⌉`,
/// `k_max = ⌊log2(Nyquist/4)⌋`.
pub fn resolvable_range(spec: &GridSpec) -> (i32, i32) {
    let k_min = (4.0 * spec.freq_step()).log2().ceil() as i32;
    let k_max = (spec.nyquist() / 4.0).log2().floor() as i32;
    (k_min, k_max)
}

pub fn check_band(spec: &GridSpec, k: i32) -> Result<()> {
    let (min, max) = resolvable_range(spec);
    if k < min || k > max {
        Err(Error::BandOutOfRange { k, min, max })
    } else {
        Ok(())
    }
}

/// Frequency-localisation operators sharing one cutoff profile.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LittlewoodPaley {
    pub cutoff: CutoffProfile,
}

impl LittlewoodPaley {
    pub fn new(cutoff: CutoffProfile) -> Self {
        Self { cutoff }
    }

    /// Multiplier of `P_k` at `|ξ|`.
    pub fn band_symbol(&self, k: i32, r: f64) -> f64 {
        self.cutoff.phi(r * 2f64.powi(-k))
    }

    /// Multiplier of `P_{≤k}` at `|ξ|`.
    pub fn below_symbol(&self, k: i32, r: f64) -> f64 {
        self.cutoff.psi(r * 2f64.powi(-k))
    }

    /// `P_k f`.
    pub fn project_band(&self, f: &SampledField, k: impl Into<BandIndex>) -> Result<SampledField> {
        let k = k.into().k;
        check_band(f.spec(), k)?;
        Ok(apply_radial_multiplier(f, |r| self.band_symbol(k, r)))
    }

    /// `P_{≤k} f`.
    pub fn project_below(&self, f: &SampledField, k: impl Into<BandIndex>) -> Result<SampledField> {
        let k = k.into().k;
        check_band(f.spec(), k)?;
        Ok(apply_radial_multiplier(f, |r| self.below_symbol(k, r)))
    }

    /// `P̃_k f`, multiplier `φ(2^{-k}ξ) |2^{-k}ξ|^s`, so that `|D|^s P_k = 2^{ks} P̃_k`.
    pub fn project_tilde(&self, f: &SampledField, k: impl Into<BandIndex>, s: f64) -> Result<SampledField> {
        let k = k.into().k;
        check_band(f.spec(), k)?;
        let scale = 2f64.powi(-k);
        Ok(apply_radial_multiplier(f, |r| {
            let t = r * scale;
            let p = self.cutoff.phi(t);
            if p == 0.0 {
                0.0
            } else {
                p * t.powf(s)
            }
        }))
    }

    /// `f_{k−N<·<k+N} = P_{<k+N} f − P_{≤k−N} f`, multiplier
    /// `ψ(2^{−(k+N−1)}ξ) − ψ(2^{−(k−N)}ξ)`.
    pub fn project_range(&self, f: &SampledField, k: i32, width: u32) -> Result<SampledField> {
        let w = width as i32;
        if w < 1 {
            return Err(Error::param("band window width must be >= 1"));
        }
        let spec = f.spec();
        check_band(spec, k)?;
        // The upper edge ψ(2^{-(k+N-1)}·) must stay below Nyquist; the lower
        // edge may sit under the grid's lowest band (it then removes the mean only).
        let (_, max) = resolvable_range(spec);
        if k + w - 1 > max {
            return Err(Error::BandOutOfRange { k: k + w - 1, min: k, max });
        }
        Ok(apply_radial_multiplier(f, |r| self.range_symbol(k, width, r)))
    }

    pub fn range_symbol(&self, k: i32, width: u32, r: f64) -> f64 {
        let w = width as i32;
        self.below_symbol(k + w - 1, r) - self.below_symbol(k - w, r)
    }

    /// Real-space kernel `2^{nk} φ̂(2^k y)` of `P_k`, sampled on the grid
    /// (periodised), centred at the origin.
    pub fn lp_kernel(&self, k: i32, spec: &GridSpec, boundary_tol: f64) -> Result<SampledField> {
        check_band(spec, k)?;
        let mut symbol = SpectralField::zeros(*spec);
        for (i, c) in symbol.coeffs_mut().iter_mut().enumerate() {
            if !spec.is_nyquist(i) {
                *c = Complex64::new(self.band_symbol(k, spec.freq_norm(i)), 0.0);
            }
        }
        let kernel = inverse_transform(&symbol).map(|v| Complex64::new(v.re, 0.0));
        kernel.check_boundary_decay(boundary_tol).map_err(|e| match e {
            Error::Geometry(msg) => Error::Geometry(format!("kernel of P_{k} does not fit the box: {msg}")),
            other => other,
        })?;
        Ok(kernel)
    }
}

/// How the zero-frequency mode is handled by negative-order operators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeanPolicy {
    /// Silently set the zero mode to zero.
    Excise,
    /// Reject inputs whose mean exceeds `tol` relative to the `L²` norm.
    Strict { tol: f64 },
}

/// `|D|^s f`, multiplier `|ξ|^s`. For `s < 0` the zero mode is excised.
pub fn fractional_derivative(f: &SampledField, s: f64) -> Result<SampledField> {
    fractional_derivative_with(f, s, MeanPolicy::Excise)
}

pub fn fractional_derivative_with(f: &SampledField, s: f64, policy: MeanPolicy) -> Result<SampledField> {
    if !s.is_finite() {
        return Err(Error::param(format!("derivative order {s} is not finite")));
    }
    if s < 0.0 {
        if let MeanPolicy::Strict { tol } = policy {
            let mean = mean_coefficient(f);
            let scale = f.l2_norm() * f.spec().volume().sqrt();
            if mean.norm() > tol * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::NonZeroMean { mean: mean.norm() });
            }
        }
    }
    Ok(apply_radial_multiplier(f, |r| {
        if r == 0.0 {
            if s == 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            r.powf(s)
        }
    }))
}

/// Zero-frequency coefficient `f̂(0) = ∫ f`.
pub fn mean_coefficient(f: &SampledField) -> Complex64 {
    crate::grid::quadrature_integral(f)
}

/// Removes the zero-frequency mode exactly.
pub fn remove_mean(f: &SampledField) -> SampledField {
    let shift = mean_coefficient(f) / f.spec().volume();
    f.map(|v| v - shift)
}

/// Spectral energy of `f` outside `|ξ| <= limit`, relative to the total.
pub fn spectral_tail_fraction(f: &SampledField, limit: f64) -> f64 {
    let ff = forward_transform(f);
    let spec = *f.spec();
    let (mut tail, mut total) = (0.0, 0.0);
    for (i, c) in ff.coeffs().iter().enumerate() {
        let e = c.norm_sqr();
        total += e;
        if spec.freq_norm(i) > limit || spec.is_nyquist(i) {
            tail += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        (tail / total).sqrt()
    }
}

/// Annulus-mass table produced by [`verify_kernel_hypothesis`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelHypothesisReport {
    pub s: f64,
    pub epsilon: f64,
    /// `∫_{|x|≤1} |P|`.
    pub unit_ball_mass: f64,
    /// `(j, ∫_{2^{j−1}≤|x|≤2^j} |P|)` for every annulus that fits the box.
    pub annulus_masses: Vec<(u32, f64)>,
    /// Annuli that did not fit inside the box.
    pub omitted: Vec<u32>,
    /// `C₀ = max(m₀, max_j m_j 2^{j(ε+s)})`.
    pub constant: f64,
    /// Least-squares slope of `log2(m_j 2^{j(ε+s)})` over the trailing annuli
    /// whose mass is above the noise floor; positive growth means the required
    /// decay fails.
    pub tail_growth: f64,
    pub pass: bool,
}

/// Largest tail growth rate of the weighted masses still counted as bounded.
pub const KERNEL_TAIL_GROWTH_TOL: f64 = 0.05;
/// Masses below this fraction of the total are treated as decayed.
pub const KERNEL_MASS_FLOOR: f64 = 1e-12;
/// Number of trailing annuli used for the growth estimate.
const KERNEL_TAIL_WINDOW: usize = 3;

/// Measures the decay hypothesis `∫_{2^{j−1}≤|x|≤2^j}|P| ≲ 2^{−j(ε+s)}`,
/// `∫_{|x|≤1}|P| ≲ 1`.
///
/// The weighted masses `w_j = m_j 2^{j(ε+s)}` must stay bounded. On a finite
/// box this is judged by the growth rate of `log2 w_j` over the last
/// annuli that fit: at most [`KERNEL_TAIL_GROWTH_TOL`] per annulus.
pub fn verify_kernel_hypothesis(p: &SampledField, s: f64, epsilon: f64) -> Result<KernelHypothesisReport> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::param(format!("s = {s} must lie in (0, 1)")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::param(format!("epsilon = {epsilon} must be positive")));
    }
    let spec = p.spec();
    let dv = spec.cell_volume();
    let reach = spec.half_width();
    let j_cap = 40u32;
    let mut unit = 0.0;
    let mut masses = vec![0.0; j_cap as usize + 1];
    for (i, v) in p.values().iter().enumerate() {
        let r = spec.radius(i);
        let a = v.norm() * dv;
        if r <= 1.0 {
            unit += a;
        }
        // Annuli are half open, (2^{j−1}, 2^j], so the unit sphere belongs to the ball.
        if r > 1.0 {
            let j = r.log2().ceil().max(1.0) as usize;
            if j <= j_cap as usize {
                masses[j] += a;
            }
        }
    }
    let mut annuli = Vec::new();
    let mut omitted = Vec::new();
    for j in 1..=j_cap {
        let outer = 2f64.powi(j as i32);
        if outer <= reach {
            annuli.push((j, masses[j as usize]));
        } else if 2f64.powi(j as i32 - 1) < reach * (spec.dim() as f64).sqrt() {
            omitted.push(j);
        }
    }
    let rate = epsilon + s;
    let total: f64 = unit + annuli.iter().map(|(_, m)| m).sum::<f64>();
    let floor = KERNEL_MASS_FLOOR * total.max(f64::MIN_POSITIVE);
    let weighted: Vec<(f64, f64)> = annuli
        .iter()
        .filter(|(_, m)| *m > floor)
        .map(|&(j, m)| (j as f64, (m * 2f64.powf(j as f64 * rate)).log2()))
        .collect();
    let constant = annuli
        .iter()
        .map(|&(j, m)| m * 2f64.powf(j as f64 * rate))
        .fold(unit, f64::max);
    let tail: Vec<(f64, f64)> = if weighted.len() > KERNEL_TAIL_WINDOW {
        weighted[weighted.len() - KERNEL_TAIL_WINDOW..].to_vec()
    } else {
        weighted.clone()
    };
    let tail_growth = crate::stats::fit_line(&tail).map(|f| f.slope).unwrap_or(f64::NEG_INFINITY);
    // Weighted masses that drop below the floor within the window count as decayed.
    let pass = unit.is_finite() && tail_growth <= KERNEL_TAIL_GROWTH_TOL;
    Ok(KernelHypothesisReport {
        s,
        epsilon,
        unit_ball_mass: unit,
        annulus_masses: annuli,
        omitted,
        constant,
        tail_growth,
        pass,
    })
}
