//! Oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use lplab::{GridSpec, SampledField};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n % 2 == 0);
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + inner + f(b)) * h / 3.0
}

/// Seeded complex white noise.
pub fn noise(spec: GridSpec, seed: u64) -> SampledField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..spec.len()).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    SampledField::new(spec, values).unwrap()
}

/// Real field built from a few random lattice-aligned modes with `|ξ| ≤ limit`,
/// zero mean and no Nyquist content.
pub fn band_limited(spec: GridSpec, limit: f64, seed: u64) -> SampledField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let step = spec.freq_step();
    let top = (limit / step).floor() as i64;
    let mut modes = Vec::new();
    while modes.len() < 8 {
        let xi: Vec<f64> = (0..spec.dim()).map(|_| rng.random_range(-top..=top) as f64 * step).collect();
        let norm = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 && norm <= limit {
            modes.push((xi, rng.random_range(-1.0..1.0), rng.random_range(0.0..2.0 * PI)));
        }
    }
    SampledField::from_real_fn(spec, |x| {
        modes
            .iter()
            .map(|(xi, amp, phase)| {
                let dot: f64 = xi.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
                amp * (2.0 * PI * dot + phase).cos()
            })
            .sum()
    })
    .unwrap()
}

pub fn rel(a: &SampledField, b: &SampledField) -> f64 {
    a.sub(b).unwrap().l2_norm() / b.l2_norm()
}

pub fn gaussian(spec: GridSpec, width: f64) -> SampledField {
    SampledField::from_real_fn(spec, |x| {
        let r2: f64 = x[..spec.dim()].iter().map(|v| v * v).sum();
        (-PI * r2 / (width * width)).exp()
    })
    .unwrap()
}
