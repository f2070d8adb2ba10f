//! Physical-space operators: the Hardy-Littlewood maximal function, the Riesz
//! potential (spectral and kernel routes), the truncated power kernels
//! `Φ₁ᴿ`, `Φ₂ᴿ`, the radial-majorant bound and the local Hölder ratio.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::grid::{convolve, convolve_with_spectrum, forward_transform, GridSpec, SampledField, SpectralField};
use crate::norms::check_holder_order;
use crate::spectral::fractional_derivative;

/// Geometric radius ladder `r_i = Δx·ρ^i` standing in for `sup_{r>0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiiPolicy {
    pub ratio: f64,
    /// Largest radius as a fraction of the half width.
    pub cap_fraction: f64,
    /// Extra radii merged into the ladder.
    #[serde(default)]
    pub extra: Vec<f64>,
}

impl Default for RadiiPolicy {
    fn default() -> Self {
        Self { ratio: std::f64::consts::SQRT_2, cap_fraction: 0.5, extra: Vec::new() }
    }
}

impl RadiiPolicy {
    pub fn radii(&self, spec: &GridSpec) -> Result<Vec<f64>> {
        if !(self.ratio > 1.0) {
            return Err(Error::param(format!("radius ratio {} must exceed 1", self.ratio)));
        }
        let h = spec.spacing();
        let cap = self.cap_fraction * spec.half_width();
        let mut out = Vec::new();
        let mut r = h;
        while r <= cap * (1.0 + 1e-12) {
            out.push(r);
            r *= self.ratio;
        }
        for &e in &self.extra {
            if e < h || e > cap * (1.0 + 1e-12) {
                return Err(Error::param(format!("extra radius {e} outside [{h}, {cap}]")));
            }
            out.push(e);
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
        Ok(out)
    }
}

/// Lattice ball indicator of radius `r` centred at the origin, normalised to
/// unit discrete mass.
pub fn ball_average_kernel(spec: &GridSpec, r: f64) -> SampledField {
    let inside: Vec<bool> = (0..spec.len()).map(|i| spec.radius(i) <= r * (1.0 + 1e-12)).collect();
    let count = inside.iter().filter(|&&b| b).count().max(1);
    let w = 1.0 / (count as f64 * spec.cell_volume());
    SampledField::from_raw(
        *spec,
        inside.iter().map(|&b| Complex64::new(if b { w } else { 0.0 }, 0.0)).collect(),
    )
}

/// Maximal operator with precomputed ball-average spectra.
#[derive(Clone, Debug)]
pub struct MaximalOperator {
    spec: GridSpec,
    radii: Vec<f64>,
    balls: Vec<SpectralField>,
}

impl MaximalOperator {
    pub fn new(spec: &GridSpec, policy: &RadiiPolicy) -> Result<Self> {
        let radii = policy.radii(spec)?;
        let balls = radii.iter().map(|&r| forward_transform(&ball_average_kernel(spec, r))).collect();
        Ok(Self { spec: *spec, radii, balls })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// `Mf(x_i) = max_r avg_{B(x_i,r)} |f|`, clamped below by `|f(x_i)|`.
    pub fn apply(&self, f: &SampledField) -> Result<SampledField> {
        self.spec.ensure_same(f.spec())?;
        let a = f.abs();
        let mut best: Vec<f64> = a.values().iter().map(|v| v.re).collect();
        for ball in &self.balls {
            let avg = convolve_with_spectrum(ball, &a);
            for (b, v) in best.iter_mut().zip(avg.values()) {
                *b = b.max(v.re);
            }
        }
        Ok(SampledField::from_raw(self.spec, best.into_iter().map(|v| Complex64::new(v, 0.0)).collect()))
    }
}

pub fn maximal_function(f: &SampledField, policy: &RadiiPolicy) -> Result<SampledField> {
    MaximalOperator::new(f.spec(), policy)?.apply(f)
}

fn check_riesz_order(s: f64, n: usize) -> Result<()> {
    if s > 0.0 && s < n as f64 {
        Ok(())
    } else {
        Err(Error::param(format!("Riesz order s = {s} must lie in (0, {n})")))
    }
}

/// `I_s g`, multiplier `|ξ|^{−s}` with the zero mode excised.
pub fn riesz_potential_spectral(g: &SampledField, s: f64) -> Result<SampledField> {
    check_riesz_order(s, g.spec().dim())?;
    fractional_derivative(g, -s)
}

/// Constant with `|ξ|^{−s} = c_{s,n} · (|x|^{s−n})^(ξ)` under the
/// `e^{−2πi x·ξ}` convention: `c_{s,n} = π^{s−n/2} Γ((n−s)/2) / Γ(s/2)`.
pub fn riesz_constant(s: f64, n: usize) -> f64 {
    let n = n as f64;
    PI.powf(s - n / 2.0) * gamma((n - s) / 2.0) / gamma(s / 2.0)
}

fn unit_ball_volume(n: usize) -> f64 {
    PI.powf(n as f64 / 2.0) / gamma(n as f64 / 2.0 + 1.0)
}

/// `|z|^{s−n}` on the grid.
///
/// The singular origin cell gets the weight that makes the lattice sum exact
/// for a Gaussian `e^{−π|z|²/σ²}` a few cells wide. This removes the
/// `O(Δx^s)` defect a plain cell average leaves (in one dimension it is the
/// zeta-function correction of the punctured trapezoid rule).
pub fn riesz_kernel(spec: &GridSpec, s: f64) -> Result<SampledField> {
    check_riesz_order(s, spec.dim())?;
    let n = spec.dim() as f64;
    let h = spec.spacing();
    let sigma = (ORIGIN_CALIBRATION_CELLS * h).min(spec.half_width() / 6.0);
    let power = |r: f64| r.powf(s - n);
    let mut punctured = 0.0;
    for i in 0..spec.len() {
        let r = spec.radius(i);
        if r > 0.0 {
            punctured += power(r) * (-PI * r * r / (sigma * sigma)).exp();
        }
    }
    punctured *= spec.cell_volume();
    // ∫ |z|^{s−n} e^{−π|z|²/σ²} dz = (ω/2) σ^s π^{−s/2} Γ(s/2), ω the sphere area.
    let sphere = 2.0 * PI.powf(n / 2.0) / gamma(n / 2.0);
    let exact = 0.5 * sphere * sigma.powf(s) * PI.powf(-s / 2.0) * gamma(s / 2.0);
    let origin = (exact - punctured) / spec.cell_volume();
    SampledField::from_real_fn(*spec, |x| {
        let r = crate::grid::norm(x);
        if r == 0.0 {
            origin
        } else {
            power(r)
        }
    })
}

/// Width, in cells, of the Gaussian that calibrates the Riesz origin weight.
const ORIGIN_CALIBRATION_CELLS: f64 = 12.0;

/// `c_{s,n} ∫ g(t) |x − t|^{s−n} dt` by lattice convolution.
pub fn riesz_potential_kernel(g: &SampledField, s: f64) -> Result<SampledField> {
    let k = riesz_kernel(g.spec(), s)?;
    Ok(convolve(&k, g)?.scale(riesz_constant(s, g.spec().dim())))
}

/// Least-squares `c` with `I_s g ≈ c · (|·|^{s−n} ∗ g)`.
pub fn fit_riesz_constant(g: &SampledField, s: f64) -> Result<f64> {
    let spectral = riesz_potential_spectral(g, s)?;
    let raw = convolve(&riesz_kernel(g.spec(), s)?, g)?;
    let num: f64 = raw.values().iter().zip(spectral.values()).map(|(a, b)| (a.conj() * b).re).sum();
    let den: f64 = raw.values().iter().map(|a| a.norm_sqr()).sum();
    if den == 0.0 {
        return Err(Error::param("zero field: Riesz constant undetermined"));
    }
    Ok(num / den)
}

/// `Φ₁ = |z|^{−n+s} 𝟙{|z| ≤ 4R}` and `Φ₂ = |z|^{−n+s−1} 𝟙{|z| ≥ 4R}`.
///
/// `Φ₂` is sampled inside the inscribed ball `|z| < L`; its mass beyond that
/// ball is added analytically to [`TruncatedKernelPair::phi2_mass`].
#[derive(Clone, Debug)]
pub struct TruncatedKernelPair {
    pub radius: f64,
    pub s: f64,
    pub phi1: SampledField,
    pub phi2: SampledField,
    pub phi1_mass: f64,
    pub phi2_mass: f64,
    /// Analytic mass of `Φ₂` outside `|z| < L`.
    pub phi2_exterior_mass: f64,
}

impl TruncatedKernelPair {
    /// `‖Φ₁‖₁ R^{−s}`, constant in `R`.
    pub fn phi1_scaled(&self) -> f64 {
        self.phi1_mass * self.radius.powf(-self.s)
    }

    /// `‖Φ₂‖₁ R^{1−s}`, constant in `R`.
    pub fn phi2_scaled(&self) -> f64 {
        self.phi2_mass * self.radius.powf(1.0 - self.s)
    }

    pub fn sum(&self) -> Result<SampledField> {
        self.phi1.add(&self.phi2)
    }
}

/// Surface measure of the unit sphere in `R^n`.
fn sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

pub fn build_truncated_kernels(radius: f64, s: f64, spec: &GridSpec) -> Result<TruncatedKernelPair> {
    check_holder_order(s)?;
    if !(radius > 0.0) {
        return Err(Error::param("kernel radius must be positive"));
    }
    let l = spec.half_width();
    if 4.0 * radius > l / 2.0 {
        return Err(Error::Geometry(format!("4R = {} exceeds L/2 = {}", 4.0 * radius, l / 2.0)));
    }
    let n = spec.dim();
    let nf = n as f64;
    let rho = (spec.cell_volume() / unit_ball_volume(n)).powf(1.0 / nf);
    let cell_avg = (nf / s) * rho.powf(s - nf);
    let cut = 4.0 * radius;
    let phi1 = SampledField::from_real_fn(*spec, |x| {
        let r = crate::grid::norm(x);
        if r == 0.0 {
            cell_avg
        } else if r <= cut {
            r.powf(s - nf)
        } else {
            0.0
        }
    })?;
    let phi2 = SampledField::from_real_fn(*spec, |x| {
        let r = crate::grid::norm(x);
        if r > cut && r < l {
            r.powf(s - nf - 1.0)
        } else {
            0.0
        }
    })?;
    let dv = spec.cell_volume();
    let phi1_mass = phi1.values().iter().map(|v| v.re).sum::<f64>() * dv;
    let exterior = sphere_area(n) * l.powf(s - 1.0) / (1.0 - s);
    let phi2_mass = phi2.values().iter().map(|v| v.re).sum::<f64>() * dv + exterior;
    Ok(TruncatedKernelPair { radius, s, phi1, phi2, phi1_mass, phi2_mass, phi2_exterior_mass: exterior })
}

/// Tolerance for accepting a kernel as radially non-increasing.
pub const RADIAL_TOL: f64 = 1e-9;

/// `max_z |Φ∗g|(z) / (‖Φ‖₁ · Mg(z))`, which the radial-majorant bound keeps
/// at or below one.
pub fn radial_majorant_check(phi: &SampledField, g: &SampledField, maximal: &MaximalOperator) -> Result<f64> {
    check_radial_decreasing(phi)?;
    let conv = convolve(phi, g)?;
    let mass = phi.values().iter().map(|v| v.re).sum::<f64>() * phi.spec().cell_volume();
    let mg = maximal.apply(g)?;
    let peak = mg.max_abs();
    let mut worst = 0.0f64;
    for (c, m) in conv.values().iter().zip(mg.values()) {
        // Points where Mg underflows carry no information.
        if m.re > 1e-14 * peak {
            worst = worst.max(c.norm() / (mass * m.re));
        }
    }
    Ok(worst)
}

fn check_radial_decreasing(phi: &SampledField) -> Result<()> {
    let spec = phi.spec();
    let peak = phi.max_abs();
    let mut pts: Vec<(f64, f64)> = phi
        .values()
        .iter()
        .map(|v| {
            if v.im.abs() > RADIAL_TOL * peak || v.re < -RADIAL_TOL * peak {
                f64::NAN
            } else {
                v.re
            }
        })
        .enumerate()
        .map(|(i, v)| (spec.radius(i), v))
        .collect();
    if pts.iter().any(|p| p.1.is_nan()) {
        return Err(Error::param("majorant kernel must be real and nonnegative"));
    }
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut i = 0;
    let mut prev_min = f64::INFINITY;
    while i < pts.len() {
        let r = pts[i].0;
        let mut j = i;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        while j < pts.len() && (pts[j].0 - r).abs() <= 1e-9 * r.max(1e-300) {
            lo = lo.min(pts[j].1);
            hi = hi.max(pts[j].1);
            j += 1;
        }
        if hi - lo > RADIAL_TOL * peak || hi > prev_min + RADIAL_TOL * peak {
            return Err(Error::param(format!("majorant kernel is not radially decreasing near r = {r}")));
        }
        prev_min = lo;
        i = j;
    }
    Ok(())
}

/// Lattice pairs over which Hölder-type suprema are taken.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSampling {
    pub random_pairs: usize,
    pub seed: u64,
    pub nearest_neighbors: bool,
    /// Number of best sampled pairs refined by lattice hill climbing.
    #[serde(default = "default_ascent_starts")]
    pub ascent_starts: usize,
}

fn default_ascent_starts() -> usize {
    64
}

impl Default for PairSampling {
    fn default() -> Self {
        Self { random_pairs: 100_000, seed: 0x5eed, nearest_neighbors: true, ascent_starts: default_ascent_starts() }
    }
}

/// Sampled supremum of `ratio(a, b)` over [`sample_pairs`], followed by
/// greedy ascent from the best `ascent_starts` pairs: either endpoint moves by
/// `±2^p` cells along any axis while the ratio increases.
pub(crate) fn pair_supremum(
    spec: &GridSpec,
    sampling: &PairSampling,
    ratio: impl Fn(usize, usize) -> f64,
) -> (f64, Option<(usize, usize)>) {
    let mut scored: Vec<(f64, usize, usize)> = sample_pairs(spec, sampling)
        .into_iter()
        .map(|(a, b)| (ratio(a, b), a, b))
        .filter(|t| t.0.is_finite())
        .collect();
    scored.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap().then((x.1, x.2).cmp(&(y.1, y.2))));
    scored.truncate(sampling.ascent_starts.max(1));
    let n = spec.samples() as i64;
    let mut steps = Vec::new();
    let mut p = 1i64;
    while p < n / 2 {
        steps.push(p);
        steps.push(-p);
        p *= 2;
    }
    let shift = |i: usize, axis: usize, d: i64| {
        let mut idx = spec.axis_indices(i);
        idx[axis] = (idx[axis] as i64 + d).rem_euclid(n) as usize;
        spec.flat_index(&idx)
    };
    let mut best = (0.0, None);
    for (mut r, mut a, mut b) in scored {
        loop {
            let mut moved = false;
            for axis in 0..spec.dim() {
                for &d in &steps {
                    for (na, nb) in [(shift(a, axis, d), b), (a, shift(b, axis, d))] {
                        if na == nb {
                            continue;
                        }
                        let v = ratio(na, nb);
                        if v > r {
                            (r, a, b) = (v, na, nb);
                            moved = true;
                        }
                    }
                }
            }
            if !moved {
                break;
            }
        }
        if r > best.0 {
            best = (r, Some((a, b)));
        }
    }
    best
}

/// Seeded uniform pairs `x ≠ y` plus, optionally, every nearest-neighbour
/// pair along each axis.
pub fn sample_pairs(spec: &GridSpec, sampling: &PairSampling) -> Vec<(usize, usize)> {
    let total = spec.len();
    let mut out = Vec::with_capacity(sampling.random_pairs + total * spec.dim());
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    while out.len() < sampling.random_pairs {
        let a = rng.random_range(0..total);
        let b = rng.random_range(0..total);
        if a != b {
            out.push((a, b));
        }
    }
    if sampling.nearest_neighbors {
        let n = spec.samples();
        for i in 0..total {
            let idx = spec.axis_indices(i);
            for axis in 0..spec.dim() {
                let mut j = idx;
                j[axis] = (j[axis] + 1) % n;
                out.push((i, spec.flat_index(&j)));
            }
        }
    }
    out
}

/// Result of [`holder_ratio`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderRatio {
    pub ratio: f64,
    /// Pair attaining the supremum (flat indices), if any.
    pub argmax: Option<(usize, usize)>,
    /// `|f(x) − f(y)|` at the maximising pair.
    pub numerator: f64,
    /// `|x − y|^s (M h(x) + M h(y))` at the maximising pair.
    pub denominator: f64,
}

/// `sup |f(x) − f(y)| / (|x − y|^s (M h(x) + M h(y)))`, `h = |D|^s f`, over
/// sampled pairs with periodic distance.
pub fn holder_ratio(f: &SampledField, s: f64, maximal: &MaximalOperator, sampling: &PairSampling) -> Result<HolderRatio> {
    check_holder_order(s)?;
    let spec = *f.spec();
    let v = f.values();
    let peak = f.max_abs();
    let spread = v.iter().map(|x| (x - v[0]).norm()).fold(0.0, f64::max);
    if spread <= 1e-14 * peak.max(f64::MIN_POSITIVE) || peak == 0.0 {
        return Ok(HolderRatio { ratio: 0.0, argmax: None, numerator: 0.0, denominator: 0.0 });
    }
    let h = fractional_derivative(f, s)?;
    let mh = maximal.apply(&h)?;
    let m = mh.values();
    let den = |a: usize, b: usize| spec.periodic_distance(a, b).powf(s) * (m[a].re + m[b].re);
    let (ratio, argmax) = pair_supremum(&spec, sampling, |a, b| {
        let num = (v[a] - v[b]).norm();
        if num == 0.0 {
            return 0.0;
        }
        num / den(a, b)
    });
    let (numerator, denominator) = match argmax {
        Some((a, b)) => ((v[a] - v[b]).norm(), den(a, b)),
        None => (0.0, 0.0),
    };
    Ok(HolderRatio { ratio, argmax, numerator, denominator })
}

/// Optional `L^p`-Hölder quantity `sup_{y} ‖(f(·) − f(·−y)) / |y|^s‖_p` over
/// the lattice shifts along the first axis.
pub fn lp_holder_modulus(f: &SampledField, s: f64, p: f64) -> Result<f64> {
    check_holder_order(s)?;
    let spec = *f.spec();
    let h = spec.spacing();
    let mut best = 0.0f64;
    for shift in 1..=(spec.samples() / 2) as i64 {
        let d = f.sub(&f.lattice_shift(0, shift))?;
        let v = crate::norms::lp_norm(&d, p)? / (shift as f64 * h).powf(s);
        best = best.max(v);
    }
    Ok(best)
}
