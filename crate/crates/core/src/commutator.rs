//! Commutators of frequency localisation with multiplication.
//!
//! Products of two fields are formed without aliasing: both spectra are
//! zero-padded to twice the samples per axis, multiplied in physical space on
//! the fine grid, and truncated back. Multiplication by a physical-space mask
//! (the dyadic annuli `φ(2^{−m}·)`) is a plain collocation product.

use num_complex::Complex64;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{convolve, raw_fft, GridSpec, SampledField, MAX_DIM};
use crate::norms::DyadicAnnulusDecomposition;
use crate::spectral::{check_band, LittlewoodPaley};

/// Relative spectral energy of a product allowed to fall beyond the grid's
/// Nyquist frequency before [`dealiased_product`] refuses.
pub const ALIASING_TOL: f64 = 1e-8;

/// `f·g` computed on a 2x zero-padded grid, truncated back to `f`'s grid.
pub fn dealiased_product(f: &SampledField, g: &SampledField) -> Result<SampledField> {
    dealiased_product_with_tol(f, g, ALIASING_TOL)
}

pub fn dealiased_product_with_tol(f: &SampledField, g: &SampledField, tol: f64) -> Result<SampledField> {
    let (prod, lost) = dealiased_product_unguarded(f, g)?;
    if lost > tol {
        return Err(Error::Aliasing(format!(
            "product has relative spectral energy {lost:.3e} beyond Nyquist {} (tolerance {tol:.1e})",
            f.spec().nyquist()
        )));
    }
    Ok(prod)
}

/// Like [`dealiased_product`] but returns the relative spectral norm of what
/// fell beyond Nyquist instead of refusing. Useful when a tiny product only
/// matters as one term of a larger sum.
pub fn dealiased_product_unguarded(f: &SampledField, g: &SampledField) -> Result<(SampledField, f64)> {
    let spec = *f.spec();
    spec.ensure_same(g.spec())?;
    let fine = GridSpec::new(spec.dim(), spec.samples() * 2, spec.half_width())?;
    let a = pad_spectrum(f, &fine);
    let b = pad_spectrum(g, &fine);
    let mut prod: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    raw_fft(&fine, &mut prod, FftDirection::Forward);

    let n = spec.samples() as i64;
    let nf = fine.samples() as i64;
    let mut coarse = vec![Complex64::new(0.0, 0.0); spec.len()];
    let (mut kept, mut lost) = (0.0, 0.0);
    let norm = 1.0 / fine.len() as f64;
    for (i, v) in prod.iter().enumerate() {
        let jf = signed(&fine, i, nf);
        let e = v.norm_sqr();
        if (0..spec.dim()).all(|a| jf[a].abs() < n / 2) {
            kept += e;
            let mut idx = [0usize; MAX_DIM];
            for a in 0..spec.dim() {
                idx[a] = jf[a].rem_euclid(n) as usize;
            }
            coarse[spec.flat_index(&idx)] = *v * norm;
        } else {
            lost += e;
        }
    }
    let total = kept + lost;
    let fraction = if total > 0.0 { (lost / total).sqrt() } else { 0.0 };
    raw_fft(&spec, &mut coarse, FftDirection::Inverse);
    Ok((SampledField::from_raw(spec, coarse), fraction))
}

fn signed(spec: &GridSpec, flat: usize, n: i64) -> [i64; MAX_DIM] {
    let idx = spec.axis_indices(flat);
    let mut out = [0; MAX_DIM];
    for a in 0..spec.dim() {
        let j = idx[a] as i64;
        out[a] = if j < n / 2 { j } else { j - n };
    }
    out
}

/// Values of `f` trigonometrically interpolated onto the fine grid. The
/// coarse Nyquist mode is dropped.
fn pad_spectrum(f: &SampledField, fine: &GridSpec) -> Vec<Complex64> {
    let spec = *f.spec();
    let mut coarse = f.values().to_vec();
    raw_fft(&spec, &mut coarse, FftDirection::Forward);
    let n = spec.samples() as i64;
    let nf = fine.samples() as i64;
    let mut padded = vec![Complex64::new(0.0, 0.0); fine.len()];
    let inv = 1.0 / spec.len() as f64;
    for (i, v) in coarse.iter().enumerate() {
        if spec.is_nyquist(i) {
            continue;
        }
        let j = signed(&spec, i, n);
        let mut idx = [0usize; MAX_DIM];
        for a in 0..spec.dim() {
            idx[a] = j[a].rem_euclid(nf) as usize;
        }
        padded[fine.flat_index(&idx)] = *v * inv;
    }
    // Coarse and fine lattices share x = -L at index 0; the fine points are
    // the coarse ones plus midpoints, so no phase correction is needed.
    raw_fft(fine, &mut padded, FftDirection::Inverse);
    padded
}

/// `[P_k, f] g = P_k(f g) − f · P_k g`.
pub fn lp_commutator(lp: &LittlewoodPaley, f: &SampledField, g: &SampledField, k: i32) -> Result<SampledField> {
    let fg = dealiased_product(f, g)?;
    let pk_fg = lp.project_band(&fg, k)?;
    let pk_g = lp.project_band(g, k)?;
    let f_pk_g = dealiased_product(f, &pk_g)?;
    pk_fg.sub(&f_pk_g)
}

/// `ℋ(x) = ∫ h(y) (f(x) − f(x−y)) g(x−y) dy = f·(h∗g) − h∗(f g)`.
pub fn kernel_commutator(h: &SampledField, f: &SampledField, g: &SampledField) -> Result<SampledField> {
    let hg = convolve(h, g)?;
    let fg = dealiased_product(f, g)?;
    let h_fg = convolve(h, &fg)?;
    dealiased_product(f, &hg)?.sub(&h_fg)
}

/// Radius of the smallest ball containing the support of `h` (above `tol`
/// relative to its peak).
pub fn support_radius(h: &SampledField, tol: f64) -> f64 {
    let peak = h.max_abs();
    let spec = h.spec();
    h.values()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() > tol * peak)
        .map(|(i, _)| spec.radius(i))
        .fold(0.0, f64::max)
}

/// Splits a kernel into `Q_j = P χ_j`, `χ_0 = ψ(|x|)`, `χ_j = φ(2^{−j}|x|)`,
/// with enough annuli to cover the whole box. `scale` dilates the masks:
/// `χ_j(x / scale)`, which is how the rescaled pieces of `2^{nk}P(2^k·)` are
/// obtained with `scale = 2^{−k}`.
pub fn annulus_decompose_kernel(
    lp: &LittlewoodPaley,
    p: &SampledField,
    scale: f64,
) -> Result<Vec<SampledField>> {
    if !(scale > 0.0) {
        return Err(Error::param("annulus scale must be positive"));
    }
    let spec = p.spec();
    let reach = spec.half_width() * (spec.dim() as f64).sqrt() / scale;
    let j_top = reach.log2().ceil().max(0.0) as i32 + 1;
    let cutoff = lp.cutoff;
    let mut pieces = Vec::with_capacity(j_top as usize + 1);
    for j in 0..=j_top {
        let q = p.map_with_position(|x, v| {
            let r = crate::grid::norm(x) / scale;
            let w = if j == 0 { cutoff.psi(r) } else { cutoff.phi(r * 2f64.powi(-j)) };
            v * w
        });
        pieces.push(q);
    }
    Ok(pieces)
}

/// The three terms of the paraproduct-style split of `[P̃_k, φ(2^{−m}·)] g`.
#[derive(Clone, Debug)]
pub struct InteractionSplit {
    pub k: i32,
    pub m: i32,
    pub width: u32,
    pub s: f64,
    /// `Σ_{l≤k−N} P̃_k(φ(2^{−m}·) P_l g)`.
    pub high_low: SampledField,
    /// `[P̃_k, φ(2^{−m}·)] g_{k−N<·<k+N}`.
    pub mid: SampledField,
    /// `Σ_{l≥k+N} P̃_k(φ(2^{−m}·) P_l g)`.
    pub high_high: SampledField,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionNorms {
    pub high_low: f64,
    pub mid: f64,
    pub high_high: f64,
}

impl InteractionSplit {
    pub fn total(&self) -> Result<SampledField> {
        self.high_low.add(&self.mid)?.add(&self.high_high)
    }

    pub fn norms(&self) -> InteractionNorms {
        InteractionNorms {
            high_low: self.high_low.l2_norm(),
            mid: self.mid.l2_norm(),
            high_high: self.high_high.l2_norm(),
        }
    }
}

/// `[P̃_k, χ] g = P̃_k(χ g) − χ P̃_k g` for a physical mask `χ`.
pub fn mask_commutator_tilde(
    lp: &LittlewoodPaley,
    mask: &SampledField,
    g: &SampledField,
    k: i32,
    s: f64,
) -> Result<SampledField> {
    let a = lp.project_tilde(&mask.mul(g)?, k, s)?;
    let b = mask.mul(&lp.project_tilde(g, k, s)?)?;
    a.sub(&b)
}

/// Splits `[P̃_k, φ(2^{−m}·)] g` into high-low, mid and high-high interactions.
///
/// The outer sums run over every band `P_l` the grid carries: the low sum
/// collects the whole `P_{≤k−N}` piece (including the zero mode) and the high
/// sum the complement of `P_{<k+N}`, so the three terms reconstruct the
/// commutator exactly for fields without a Nyquist component.
pub fn interaction_split(
    lp: &LittlewoodPaley,
    g: &SampledField,
    k: i32,
    m: i32,
    width: u32,
    s: f64,
) -> Result<InteractionSplit> {
    if width < 3 {
        return Err(Error::param(format!("interaction split needs N >= 3, got {width}")));
    }
    let spec = g.spec();
    check_band(spec, k)?;
    let w = width as i32;
    let mask = DyadicAnnulusDecomposition::annulus_mask(spec, &lp.cutoff, m);

    // Low part: P_{≤k−N} g.
    let low = crate::grid::apply_radial_multiplier(g, |r| lp.below_symbol(k - w, r));
    // High part: (1 − ψ(2^{−(k+N−1)}ξ)) g, i.e. Σ_{l≥k+N} P_l g.
    let high = crate::grid::apply_radial_multiplier(g, |r| 1.0 - lp.below_symbol(k + w - 1, r));
    let mid_input = crate::grid::apply_radial_multiplier(g, |r| lp.range_symbol(k, width, r));

    let high_low = lp.project_tilde(&mask.mul(&low)?, k, s)?;
    let high_high = lp.project_tilde(&mask.mul(&high)?, k, s)?;
    let mid = mask_commutator_tilde(lp, &mask, &mid_input, k, s)?;
    Ok(InteractionSplit { k, m, width, s, high_low, mid, high_high })
}
