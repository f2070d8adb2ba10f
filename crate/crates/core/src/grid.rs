//! Sampled fields on the periodic box `[-L, L)^n` and the lattice Fourier
//! transform.
//!
//! The continuum convention is `f̂(ξ) = ∫ f(x) e^{-2πi x·ξ} dx`. On the grid
//! this becomes a DFT weighted by `Δx^n`, with a `(-1)^{j}` phase accounting
//! for the box starting at `-L` instead of `0`. Spectral coefficients are kept
//! in FFT order: per axis, index `j < N/2` is frequency `j·Δξ`, index
//! `j >= N/2` is frequency `(j - N)·Δξ`, and `j = N/2` is the Nyquist mode.

use std::cell::RefCell;
use std::fmt;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 3;

/// Uniform periodic lattice on `[-L, L)^n` with `N` samples per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(rename = "n")]
    dim: usize,
    #[serde(rename = "N")]
    samples: usize,
    #[serde(rename = "L")]
    half_width: f64,
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} N={} L={}", self.dim, self.samples, self.half_width)
    }
}

impl GridSpec {
    pub fn new(dim: usize, samples: usize, half_width: f64) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if samples < 16 || !samples.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "samples per axis {samples} must be a power of two >= 16"
            )));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!("half width {half_width} must be positive")));
        }
        Ok(Self { dim, samples, half_width })
    }

    /// Desk-scale default for the given dimension.
    pub fn default_for(dim: usize) -> Result<Self> {
        match dim {
            1 => Self::new(1, 1024, 16.0),
            2 => Self::new(2, 256, 12.0),
            3 => Self::new(3, 64, 8.0),
            _ => Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3"))),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Total number of lattice points, `N^n`.
    pub fn len(&self) -> usize {
        self.samples.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.samples as f64
    }

    pub fn freq_step(&self) -> f64 {
        0.5 / self.half_width
    }

    pub fn nyquist(&self) -> f64 {
        self.samples as f64 / (4.0 * self.half_width)
    }

    /// Quadrature weight `Δx^n`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Box volume `(2L)^n`.
    pub fn volume(&self) -> f64 {
        (2.0 * self.half_width).powi(self.dim as i32)
    }

    /// Same box, twice the samples per axis.
    pub fn refined(&self) -> Self {
        Self { samples: self.samples * 2, ..*self }
    }

    /// Per-axis lattice indices of a flat (row-major) index.
    pub fn axis_indices(&self, flat: usize) -> [usize; MAX_DIM] {
        let mut out = [0; MAX_DIM];
        let mut rem = flat;
        for a in (0..self.dim).rev() {
            out[a] = rem % self.samples;
            rem /= self.samples;
        }
        out
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().take(self.dim).fold(0, |acc, &i| acc * self.samples + i)
    }

    /// Physical position of a lattice point; unused axes are zero.
    pub fn position(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.axis_indices(flat);
        let h = self.spacing();
        let mut x = [0.0; MAX_DIM];
        for a in 0..self.dim {
            x[a] = -self.half_width + idx[a] as f64 * h;
        }
        x
    }

    pub fn radius(&self, flat: usize) -> f64 {
        norm(&self.position(flat))
    }

    /// Flat index of the lattice point at the origin.
    pub fn origin_index(&self) -> usize {
        let half = self.samples / 2;
        self.flat_index(&[half; MAX_DIM])
    }

    /// Signed integer frequency of an FFT-ordered index, per axis.
    pub fn freq_indices(&self, flat: usize) -> [i64; MAX_DIM] {
        let idx = self.axis_indices(flat);
        let n = self.samples as i64;
        let mut out = [0; MAX_DIM];
        for a in 0..self.dim {
            let j = idx[a] as i64;
            out[a] = if j < n / 2 { j } else { j - n };
        }
        out
    }

    pub fn frequency(&self, flat: usize) -> [f64; MAX_DIM] {
        let j = self.freq_indices(flat);
        let step = self.freq_step();
        let mut xi = [0.0; MAX_DIM];
        for a in 0..self.dim {
            xi[a] = j[a] as f64 * step;
        }
        xi
    }

    pub fn freq_norm(&self, flat: usize) -> f64 {
        norm(&self.frequency(flat))
    }

    /// True when any axis sits on the Nyquist index `N/2`.
    pub fn is_nyquist(&self, flat: usize) -> bool {
        let idx = self.axis_indices(flat);
        (0..self.dim).any(|a| idx[a] == self.samples / 2)
    }

    /// `(-1)^{Σ j}` for an FFT-ordered index; accounts for the box offset `-L`.
    fn phase_sign(&self, flat: usize) -> f64 {
        let idx = self.axis_indices(flat);
        let parity: usize = idx.iter().take(self.dim).sum();
        if parity % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Flat index of the lattice point `-x` (periodic), used for symmetry checks.
    pub fn reflected_index(&self, flat: usize) -> usize {
        let idx = self.axis_indices(flat);
        let mut out = [0; MAX_DIM];
        for a in 0..self.dim {
            out[a] = (self.samples - idx[a]) % self.samples;
        }
        self.flat_index(&out)
    }

    /// Periodic (minimum image) distance between two lattice points.
    pub fn periodic_distance(&self, a: usize, b: usize) -> f64 {
        let ia = self.axis_indices(a);
        let ib = self.axis_indices(b);
        let n = self.samples as i64;
        let h = self.spacing();
        let mut sq = 0.0;
        for ax in 0..self.dim {
            let mut d = (ia[ax] as i64 - ib[ax] as i64).rem_euclid(n);
            if d > n / 2 {
                d = n - d;
            }
            let dx = d as f64 * h;
            sq += dx * dx;
        }
        sq.sqrt()
    }

    pub(crate) fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch { left: self.to_string(), right: other.to_string() })
        }
    }
}

pub fn norm(v: &[f64; MAX_DIM]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Complex samples at the lattice points of a [`GridSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct SampledField {
    spec: GridSpec,
    values: Vec<Complex64>,
}

impl SampledField {
    pub fn new(spec: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} samples, got {}",
                spec.len(),
                values.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { spec, values })
    }

    /// Internal constructor for operator outputs that are finite by construction.
    pub(crate) fn from_raw(spec: GridSpec, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), spec.len());
        Self { spec, values }
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self { spec, values: vec![Complex64::new(0.0, 0.0); spec.len()] }
    }

    pub fn constant(spec: GridSpec, c: Complex64) -> Self {
        Self { spec, values: vec![c; spec.len()] }
    }

    /// Samples `f(x)` at every lattice point.
    pub fn from_fn(spec: GridSpec, f: impl Fn(&[f64; MAX_DIM]) -> Complex64) -> Result<Self> {
        let values = (0..spec.len()).map(|i| f(&spec.position(i))).collect();
        Self::new(spec, values)
    }

    pub fn from_real_fn(spec: GridSpec, f: impl Fn(&[f64; MAX_DIM]) -> f64) -> Result<Self> {
        Self::from_fn(spec, |x| Complex64::new(f(x), 0.0))
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn abs(&self) -> SampledField {
        self.map(|v| Complex64::new(v.norm(), 0.0))
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> SampledField {
        Self::from_raw(self.spec, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Pointwise map with access to the lattice position.
    pub fn map_with_position(&self, f: impl Fn(&[f64; MAX_DIM], Complex64) -> Complex64) -> SampledField {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| f(&self.spec.position(i), v))
            .collect();
        Self::from_raw(self.spec, values)
    }

    pub fn scale(&self, c: f64) -> SampledField {
        self.map(|v| v * c)
    }

    pub fn add(&self, other: &SampledField) -> Result<SampledField> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SampledField) -> Result<SampledField> {
        self.zip(other, |a, b| a - b)
    }

    /// Collocation (pointwise) product. For products of two spectrally
    /// resolved fields prefer [`crate::commutator::dealiased_product`].
    pub fn mul(&self, other: &SampledField) -> Result<SampledField> {
        self.zip(other, |a, b| a * b)
    }

    pub fn zip(&self, other: &SampledField, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<SampledField> {
        self.spec.ensure_same(&other.spec)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self::from_raw(self.spec, values))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Discrete `L²` norm `(Σ |f|² Δx^n)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.spec.cell_volume()).sqrt()
    }

    /// Largest magnitude on the outer faces of the box.
    pub fn boundary_max(&self) -> f64 {
        let n = self.spec.samples;
        (0..self.spec.len())
            .filter(|&i| {
                let idx = self.spec.axis_indices(i);
                (0..self.spec.dim).any(|a| idx[a] == 0 || idx[a] == n - 1)
            })
            .fold(0.0, |m, i| m.max(self.values[i].norm()))
    }

    /// Checks that the field has decayed at the box boundary, so periodization
    /// is negligible: `max_boundary |f| <= tol · max |f|`.
    pub fn check_boundary_decay(&self, tol: f64) -> Result<()> {
        let peak = self.max_abs();
        let edge = self.boundary_max();
        if edge <= tol * peak {
            Ok(())
        } else {
            Err(Error::Geometry(format!(
                "boundary magnitude {edge:e} exceeds {tol:e} x peak {peak:e}"
            )))
        }
    }

    /// Shifts the field by an integer number of lattice steps along one axis
    /// (periodically), i.e. returns `f(x - shift·Δx·e_axis)`.
    pub fn lattice_shift(&self, axis: usize, shift: i64) -> SampledField {
        let n = self.spec.samples as i64;
        let mut out = vec![Complex64::new(0.0, 0.0); self.values.len()];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut idx = self.spec.axis_indices(i);
            idx[axis] = (idx[axis] as i64 - shift).rem_euclid(n) as usize;
            *slot = self.values[self.spec.flat_index(&idx)];
        }
        Self::from_raw(self.spec, out)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        let peak = self.max_abs();
        self.values.iter().all(|v| v.im.abs() <= tol * peak.max(f64::MIN_POSITIVE))
    }
}

/// Lattice Fourier coefficients in FFT order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    spec: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(spec: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != spec.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} coefficients, got {}",
                spec.len(),
                coeffs.len()
            )));
        }
        if let Some(index) = coeffs.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { spec, coeffs })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self { spec, coeffs: vec![Complex64::new(0.0, 0.0); spec.len()] }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Flat FFT-order index of an integer frequency vector.
    pub fn index_of(&self, freq: &[i64]) -> usize {
        let n = self.spec.samples as i64;
        let idx: Vec<usize> = freq.iter().take(self.spec.dim).map(|&j| j.rem_euclid(n) as usize).collect();
        self.spec.flat_index(&idx)
    }

    pub fn at(&self, freq: &[i64]) -> Complex64 {
        self.coeffs[self.index_of(freq)]
    }

    pub fn set(&mut self, freq: &[i64], value: Complex64) {
        let i = self.index_of(freq);
        self.coeffs[i] = value;
    }

    /// `(Δξ^n Σ |F|²)^{1/2}`; equals the `L²` norm of the inverse transform.
    pub fn l2_norm(&self) -> f64 {
        (self.coeffs.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.spec.freq_step().powi(self.spec.dim as i32))
            .sqrt()
    }
}

/// Forward transform `F(ξ) ≈ ∫ f(x) e^{-2πi x·ξ} dx`.
pub fn forward_transform(f: &SampledField) -> SpectralField {
    let spec = f.spec;
    let mut data = f.values.clone();
    fft_nd(&spec, &mut data, FftDirection::Forward);
    let w = spec.cell_volume();
    for (i, v) in data.iter_mut().enumerate() {
        *v *= w * spec.phase_sign(i);
    }
    SpectralField { spec, coeffs: data }
}

/// Exact inverse of [`forward_transform`].
pub fn inverse_transform(spectrum: &SpectralField) -> SampledField {
    let spec = spectrum.spec;
    let mut data: Vec<Complex64> =
        spectrum.coeffs.iter().enumerate().map(|(i, &v)| v * spec.phase_sign(i)).collect();
    fft_nd(&spec, &mut data, FftDirection::Inverse);
    let w = spec.freq_step().powi(spec.dim as i32);
    for v in data.iter_mut() {
        *v *= w;
    }
    SampledField { spec, values: data }
}

/// Checked inverse transform onto an expected grid.
pub fn inverse_transform_on(spectrum: &SpectralField, spec: &GridSpec) -> Result<SampledField> {
    spectrum.spec.ensure_same(spec)?;
    Ok(inverse_transform(spectrum))
}

/// `Σ f · Δx^n`.
pub fn quadrature_integral(f: &SampledField) -> Complex64 {
    f.values.iter().sum::<Complex64>() * f.spec.cell_volume()
}

/// Applies a Fourier multiplier `m(ξ)` given as a function of the frequency
/// vector and its norm. Nyquist modes are zeroed.
pub fn apply_multiplier(f: &SampledField, m: impl Fn(&[f64; MAX_DIM], f64) -> Complex64) -> SampledField {
    let spec = f.spec;
    let mut data = f.values.clone();
    fft_nd(&spec, &mut data, FftDirection::Forward);
    let inv = 1.0 / spec.len() as f64;
    for (i, v) in data.iter_mut().enumerate() {
        if spec.is_nyquist(i) {
            *v = Complex64::new(0.0, 0.0);
        } else {
            let xi = spec.frequency(i);
            *v *= m(&xi, norm(&xi)) * inv;
        }
    }
    fft_nd(&spec, &mut data, FftDirection::Inverse);
    SampledField { spec, values: data }
}

/// Radial real multiplier `m(|ξ|)`, Nyquist zeroed.
pub fn apply_radial_multiplier(f: &SampledField, m: impl Fn(f64) -> f64) -> SampledField {
    apply_multiplier(f, |_, r| Complex64::new(m(r), 0.0))
}

/// A radial real multiplier tabulated on one grid, for repeated use.
#[derive(Clone, Debug)]
pub struct TabulatedMultiplier {
    spec: GridSpec,
    /// Symbol in FFT order with the inverse-FFT normalisation folded in.
    weights: Vec<f64>,
}

impl TabulatedMultiplier {
    /// Tabulates `m(|ξ|)`; Nyquist modes get weight zero.
    pub fn radial(spec: &GridSpec, m: impl Fn(f64) -> f64) -> Self {
        let inv = 1.0 / spec.len() as f64;
        let weights = (0..spec.len())
            .map(|i| if spec.is_nyquist(i) { 0.0 } else { m(spec.freq_norm(i)) * inv })
            .collect();
        Self { spec: *spec, weights }
    }

    pub fn apply(&self, f: &SampledField) -> Result<SampledField> {
        self.spec.ensure_same(&f.spec)?;
        let mut data = f.values.clone();
        fft_nd(&self.spec, &mut data, FftDirection::Forward);
        for (v, w) in data.iter_mut().zip(&self.weights) {
            *v *= *w;
        }
        fft_nd(&self.spec, &mut data, FftDirection::Inverse);
        Ok(SampledField { spec: self.spec, values: data })
    }
}

/// Periodic convolution `(h * g)(x) = Σ_y h(y) g(x - y) Δx^n`, with `h`
/// centred at the lattice origin.
pub fn convolve(h: &SampledField, g: &SampledField) -> Result<SampledField> {
    h.spec.ensure_same(&g.spec)?;
    let hh = forward_transform(h);
    let gg = forward_transform(g);
    let prod: Vec<Complex64> = hh.coeffs.iter().zip(&gg.coeffs).map(|(a, b)| a * b).collect();
    Ok(inverse_transform(&SpectralField { spec: h.spec, coeffs: prod }))
}

/// Convolution against a precomputed kernel spectrum.
pub(crate) fn convolve_with_spectrum(kernel: &SpectralField, g: &SampledField) -> SampledField {
    let gg = forward_transform(g);
    let prod: Vec<Complex64> = kernel.coeffs.iter().zip(&gg.coeffs).map(|(a, b)| a * b).collect();
    inverse_transform(&SpectralField { spec: g.spec, coeffs: prod })
}

/// Raw unnormalised DFT (FFT order), used by the de-aliased product.
pub(crate) fn raw_fft(spec: &GridSpec, data: &mut [Complex64], direction: FftDirection) {
    fft_nd(spec, data, direction);
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

const TILE: usize = 16;

/// Unnormalised in-place n-dimensional FFT over a row-major buffer.
fn fft_nd(spec: &GridSpec, data: &mut [Complex64], direction: FftDirection) {
    let n = spec.samples;
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft(n, direction));
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    // Last axis is contiguous.
    fft.process_with_scratch(data, &mut scratch);
    if spec.dim == 1 {
        return;
    }
    let total = data.len();
    let mut line = vec![Complex64::new(0.0, 0.0); n * n];
    for axis in 0..spec.dim - 1 {
        let stride = n.pow((spec.dim - 1 - axis) as u32);
        let block = stride * n;
        // Batches of up to `n` lines sharing the same outer block are gathered
        // together to keep memory access sequential.
        for base in (0..total).step_by(block) {
            for chunk_start in (0..stride).step_by(n) {
                let width = n.min(stride - chunk_start);
                // Tiled so both the strided and the sequential side stay in cache.
                for k0 in (0..n).step_by(TILE) {
                    for c0 in (0..width).step_by(TILE) {
                        for k in k0..(k0 + TILE).min(n) {
                            let row = base + k * stride + chunk_start;
                            for c in c0..(c0 + TILE).min(width) {
                                line[c * n + k] = data[row + c];
                            }
                        }
                    }
                }
                fft.process_with_scratch(&mut line[..width * n], &mut scratch);
                for k0 in (0..n).step_by(TILE) {
                    for c0 in (0..width).step_by(TILE) {
                        for k in k0..(k0 + TILE).min(n) {
                            let row = base + k * stride + chunk_start;
                            for c in c0..(c0 + TILE).min(width) {
                                data[row + c] = line[c * n + k];
                            }
                        }
                    }
                }
            }
        }
    }
}
