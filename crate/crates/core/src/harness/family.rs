//! Test functions: rapidly decaying stand-ins for Schwartz functions.
//!
//! Every generator is an explicit closed-form function on `R^n`, sampled on
//! the grid. Three transformations are layered on top of a base member:
//! dilation `f(λx)`, removal of the mean (by subtracting a matched
//! Gaussian with the same mass) and lacunary roughening, which multiplies the
//! member by `Σ_j 2^{−sj} cos(2π 2^j x₁ + θ_j)` so that `|D|^s f` stays of
//! unit size across every dyadic band `j0..=j1`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{norm, GridSpec, SampledField, MAX_DIM};
use crate::spectral::remove_mean;

/// Relative boundary magnitude every generated field must respect.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// `exp(−π|x − c|² / w²) · cos(2π ξ₀·x)`.
    Gaussian {
        #[serde(default)]
        center: Vec<f64>,
        width: f64,
        #[serde(default)]
        modulation: Vec<f64>,
    },
    /// `exp(1 − 1/(1 − |x − c|²/R²))` inside the ball, zero outside.
    Bump {
        #[serde(default)]
        center: Vec<f64>,
        radius: f64,
    },
    /// Sum of Gaussian wave packets with seeded centres, phases and carrier
    /// frequencies `|ξ| ∈ [2^{k_lo}, 2^{k_hi}]`.
    RandomPackets { k_lo: i32, k_hi: i32, count: usize, seed: u64 },
    /// `H_d(√(2π) x₁ / w) · exp(−π|x|² / w²)` with the physicists' Hermite
    /// polynomial `H_d`, `d ≤ 4`.
    Hermite { degree: u32, width: f64 },
    /// `Δ exp(−π|x|²/w²)`, mean-free by construction.
    MexicanHat { width: f64 },
}

/// Lacunary roughening `Σ_{j=j0}^{j1} 2^{−sj} cos(2π 2^j x₁ + θ_j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Roughness {
    pub s: f64,
    pub j0: i32,
    pub j1: i32,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub name: String,
    #[serde(flatten)]
    pub generator: Generator,
}

impl FamilyMember {
    pub fn new(name: impl Into<String>, generator: Generator) -> Self {
        Self { name: name.into(), generator }
    }

    /// Characteristic length, used to size the matched Gaussian.
    pub fn scale(&self) -> f64 {
        match &self.generator {
            Generator::Gaussian { center, width, .. } => width + norm(&pad(center)),
            Generator::Bump { center, radius } => radius + norm(&pad(center)),
            Generator::RandomPackets { .. } => 2.5,
            Generator::Hermite { width, .. } => *width * 1.5,
            Generator::MexicanHat { width } => *width,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(format!("member '{}': {what}", self.name)));
        match &self.generator {
            Generator::Gaussian { center, width, modulation } => {
                if center.len() > dim || modulation.len() > dim {
                    return bad("vector longer than the grid dimension");
                }
                if !(*width > 0.0) {
                    return bad("width must be positive");
                }
            }
            Generator::Bump { center, radius } => {
                if center.len() > dim {
                    return bad("centre longer than the grid dimension");
                }
                if !(*radius > 0.0) {
                    return bad("radius must be positive");
                }
            }
            Generator::RandomPackets { k_lo, k_hi, count, .. } => {
                if k_lo > k_hi || *count == 0 {
                    return bad("need k_lo <= k_hi and at least one packet");
                }
            }
            Generator::Hermite { degree, width } => {
                if *degree > 4 || !(*width > 0.0) {
                    return bad("degree must be at most 4 and width positive");
                }
            }
            Generator::MexicanHat { width } => {
                if !(*width > 0.0) {
                    return bad("width must be positive");
                }
            }
        }
        Ok(())
    }

    /// Point evaluation of the base member.
    pub fn evaluator(&self, dim: usize) -> Box<dyn Fn(&[f64; MAX_DIM]) -> f64 + Send + Sync> {
        match self.generator.clone() {
            Generator::Gaussian { center, width, modulation } => {
                let c = pad(&center);
                let m = pad(&modulation);
                Box::new(move |x| {
                    let d = sub(x, &c);
                    let phase = 2.0 * PI * dot(&m, x);
                    (-PI * dot(&d, &d) / (width * width)).exp() * phase.cos()
                })
            }
            Generator::Bump { center, radius } => {
                let c = pad(&center);
                Box::new(move |x| {
                    let d = sub(x, &c);
                    let t = dot(&d, &d) / (radius * radius);
                    if t < 1.0 {
                        (1.0 - 1.0 / (1.0 - t)).exp()
                    } else {
                        0.0
                    }
                })
            }
            Generator::RandomPackets { k_lo, k_hi, count, seed } => {
                let packets = random_packets(dim, k_lo, k_hi, count, seed);
                Box::new(move |x| {
                    packets
                        .iter()
                        .map(|p| {
                            let d = sub(x, &p.center);
                            p.amplitude * (-PI * dot(&d, &d)).exp() * (2.0 * PI * dot(&p.carrier, x) + p.phase).cos()
                        })
                        .sum()
                })
            }
            Generator::Hermite { degree, width } => Box::new(move |x| {
                let u = (2.0 * PI).sqrt() * x[0] / width;
                hermite(degree, u) * (-PI * dot(x, x) / (width * width)).exp()
            }),
            Generator::MexicanHat { width } => {
                let n = dim as f64;
                Box::new(move |x| {
                    let a = PI / (width * width);
                    let r2 = dot(x, x);
                    (4.0 * a * a * r2 - 2.0 * a * n) * (-a * r2).exp()
                })
            }
        }
    }
}

struct Packet {
    center: [f64; MAX_DIM],
    carrier: [f64; MAX_DIM],
    phase: f64,
    amplitude: f64,
}

fn random_packets(dim: usize, k_lo: i32, k_hi: i32, count: usize, seed: u64) -> Vec<Packet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut center = [0.0; MAX_DIM];
            let mut dir = [0.0; MAX_DIM];
            for a in 0..dim {
                center[a] = rng.random_range(-1.5..1.5);
                dir[a] = rng.random_range(-1.0..1.0);
            }
            let len = norm(&dir).max(1e-3);
            let freq = 2f64.powf(rng.random_range(k_lo as f64..=k_hi as f64));
            let mut carrier = [0.0; MAX_DIM];
            for a in 0..dim {
                carrier[a] = dir[a] / len * freq;
            }
            Packet { center, carrier, phase: rng.random_range(0.0..2.0 * PI), amplitude: rng.random_range(0.5..1.0) }
        })
        .collect()
}

fn hermite(d: u32, u: f64) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0 * u,
        2 => 4.0 * u * u - 2.0,
        3 => 8.0 * u.powi(3) - 12.0 * u,
        _ => 16.0 * u.powi(4) - 48.0 * u * u + 12.0,
    }
}

fn pad(v: &[f64]) -> [f64; MAX_DIM] {
    let mut out = [0.0; MAX_DIM];
    for (o, x) in out.iter_mut().zip(v) {
        *o = *x;
    }
    out
}

fn sub(a: &[f64; MAX_DIM], b: &[f64; MAX_DIM]) -> [f64; MAX_DIM] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: &[f64; MAX_DIM], b: &[f64; MAX_DIM]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// How a member is turned into a field.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Shaping {
    /// Evaluate `f(λx)`; `None` means `λ = 1`.
    #[serde(default)]
    pub dilation: Option<f64>,
    #[serde(default)]
    pub mean_free: bool,
    #[serde(default)]
    pub roughness: Option<Roughness>,
}

impl Shaping {
    pub fn plain() -> Self {
        Self::default()
    }

    pub fn mean_free() -> Self {
        Self { mean_free: true, ..Self::default() }
    }
}

/// Samples `member` on `spec` under `shaping` and checks boundary decay.
pub fn sample_member(member: &FamilyMember, spec: &GridSpec, shaping: &Shaping) -> Result<SampledField> {
    member.validate(spec.dim())?;
    let lambda = shaping.dilation.unwrap_or(1.0);
    if !(lambda > 0.0) {
        return Err(Error::Config(format!("dilation must be positive, got {lambda}")));
    }
    let base = member.evaluator(spec.dim());
    let rough = shaping.roughness.as_ref().map(lacunary_series).transpose()?;
    let eval = |x: &[f64; MAX_DIM]| {
        let y = [lambda * x[0], lambda * x[1], lambda * x[2]];
        let v = base(&y);
        match &rough {
            Some(r) => v * r(x),
            None => v,
        }
    };
    let mut field = SampledField::from_real_fn(*spec, eval)?;
    let needs_mean_free = shaping.mean_free && !matches!(member.generator, Generator::MexicanHat { .. });
    if needs_mean_free {
        let mass: f64 = field.values().iter().map(|v| v.re).sum::<f64>() * spec.cell_volume();
        let w = member.scale() / lambda;
        let n = spec.dim() as i32;
        let matched = SampledField::from_real_fn(*spec, |x| (-PI * dot(x, x) / (w * w)).exp() / w.powi(n))?;
        field = field.sub(&matched.scale(mass))?;
    }
    if shaping.mean_free {
        field = remove_mean(&field);
    }
    field.check_boundary_decay(BOUNDARY_TOL).map_err(|e| {
        Error::Config(format!("member '{}' on grid {spec}: {e}", member.name))
    })?;
    Ok(field)
}

fn lacunary_series(r: &Roughness) -> Result<impl Fn(&[f64; MAX_DIM]) -> f64> {
    if r.j0 > r.j1 || !(r.s > 0.0 && r.s < 1.0) {
        return Err(Error::Config(format!("invalid roughness {r:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(r.seed);
    let terms: Vec<(f64, f64, f64)> = (r.j0..=r.j1)
        .map(|j| (2f64.powf(-r.s * j as f64), 2.0 * PI * 2f64.powi(j), rng.random_range(0.0..2.0 * PI)))
        .collect();
    Ok(move |x: &[f64; MAX_DIM]| terms.iter().map(|(a, w, t)| a * (w * x[0] + t).cos()).sum())
}

/// A named set of members.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionFamily {
    pub members: Vec<FamilyMember>,
}

impl TestFunctionFamily {
    /// Two Gaussians, one bump, one modulated Gaussian and two seeded random
    /// packet sums.
    pub fn default_for(dim: usize, seed: u64) -> Self {
        let off = |v: f64| {
            let mut c = vec![0.0; dim];
            c[0] = v;
            c
        };
        let mut diag = vec![0.0; dim];
        diag[0] = 1.0;
        Self {
            members: vec![
                FamilyMember::new("gauss-narrow", Generator::Gaussian { center: off(0.3), width: 1.0, modulation: vec![] }),
                FamilyMember::new("gauss-wide", Generator::Gaussian { center: off(-0.5), width: 1.6, modulation: vec![] }),
                FamilyMember::new("bump", Generator::Bump { center: vec![], radius: 2.0 }),
                FamilyMember::new("gauss-modulated", Generator::Gaussian { center: vec![], width: 1.2, modulation: diag }),
                FamilyMember::new("packets-a", Generator::RandomPackets { k_lo: -1, k_hi: 1, count: 3, seed }),
                FamilyMember::new("packets-b", Generator::RandomPackets { k_lo: -1, k_hi: 1, count: 3, seed: seed.wrapping_add(1) }),
            ],
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.members.is_empty() {
            return Err(Error::Config("family has no members".into()));
        }
        self.members.iter().try_for_each(|m| m.validate(dim))
    }
}
