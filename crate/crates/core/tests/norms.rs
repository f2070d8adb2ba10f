mod common;

use std::f64::consts::PI;

use common::{gaussian, noise};
use lplab::harness::{sample_member, Shaping, TestFunctionFamily};
use lplab::norms::*;
use lplab::realspace::PairSampling;
use lplab::stats::median;
use lplab::*;
use num_complex::Complex64;

fn scales(spec: &GridSpec) -> NormScales {
    NormScales::new(spec, CutoffProfile::default())
}

#[test]
fn lp_norm_examples() {
    let spec = GridSpec::new(2, 64, 3.0).unwrap();
    let one = SampledField::constant(spec, Complex64::new(1.0, 0.0));
    for p in [1.0, 1.5, 2.0, 4.0] {
        let want = 36f64.powf(1.0 / p);
        assert!((lp_norm(&one, p).unwrap() / want - 1.0).abs() < 1e-12);
    }
    assert_eq!(lp_norm(&one, f64::INFINITY).unwrap(), 1.0);
    let spec1 = GridSpec::default_for(1).unwrap();
    let g = gaussian(spec1, 1.0);
    for p in [1.0f64, 2.0, 4.0] {
        let want = p.powf(-1.0 / (2.0 * p));
        assert!((lp_norm(&g, p).unwrap() - want).abs() < 1e-8, "p = {p}");
    }
    for seed in 0..5 {
        let (a, b) = (noise(spec1, seed), noise(spec1, seed + 100));
        for p in [1.0, 3.0, f64::INFINITY] {
            let sum = lp_norm(&a.add(&b).unwrap(), p).unwrap();
            assert!(sum <= lp_norm(&a, p).unwrap() + lp_norm(&b, p).unwrap() + 1e-12);
        }
    }
    assert!(lp_norm(&g, 0.5).is_err());
}

/// Gaussian ring of width `w` at radius `2^m` carrying frequency `ξ0` (1D).
fn ring_packet(spec: GridSpec, m: i32, w: f64, xi0: f64) -> SampledField {
    let r0 = 2f64.powi(m);
    SampledField::from_real_fn(spec, |x| {
        let d = (x[0].abs() - r0) / w;
        (-PI * d * d).exp() * (2.0 * PI * xi0 * x[0]).cos()
    })
    .unwrap()
}

#[test]
fn annulus_pieces() {
    let spec = GridSpec::default_for(1).unwrap();
    let sc = scales(&spec);
    let f = ring_packet(spec, 2, 0.25, 0.0);
    assert!((sc.annulus_l2(&f, 2).unwrap() / f.l2_norm() - 1.0).abs() < 1e-3);
    assert!(sc.annulus_l2(&f, 0).unwrap() < 1e-12 * f.l2_norm());
    assert!(sc.annulus_l2(&f, 3).unwrap() < 1e-6 * f.l2_norm());
    let zero = SampledField::zeros(spec);
    assert_eq!(sc.annulus_l2(&zero, 1).unwrap(), 0.0);
    let g = noise(spec, 1);
    let (lo, hi) = DyadicAnnulusDecomposition::default_range(&spec);
    let total: f64 = (lo..=hi).map(|m| sc.annulus_l2(&g, m).unwrap().powi(2)).sum();
    assert!(total <= 2.0 * g.l2_norm().powi(2));
    assert!(sc.annulus_l2(&g, hi + 2).is_err());
}

#[test]
fn partition_masks_cover_the_box() {
    for dim in [1, 2] {
        let spec = GridSpec::default_for(dim).unwrap();
        let dec = DyadicAnnulusDecomposition::new(&spec, CutoffProfile::default());
        let masks = dec.partition_masks();
        for i in 0..spec.len() {
            let sum: f64 = masks.iter().map(|m| m.values()[i].re).sum();
            assert!((sum - 1.0).abs() < 1e-10);
        }
        for m in 1..=2 {
            let mask = dec.mask(m);
            for i in 0..spec.len() {
                let (v, r) = (mask.values()[i].re, spec.radius(i));
                assert!(v >= 0.0);
                if v > 0.0 {
                    assert!(r >= 2f64.powi(m - 1) && r <= 2f64.powi(m + 1));
                }
            }
        }
    }
}

#[test]
fn y_seminorm_on_a_concentrated_packet() {
    // Ring at |x| = 8 of width 1/2 at frequency 64: one band, one annulus.
    let spec = GridSpec::new(1, 16384, 16.0).unwrap();
    let sc = scales(&spec);
    let (k, m0) = (6, 3);
    let f = ring_packet(spec, m0, 0.5, 64.0);
    let fk = sc.lp.project_band(&f, k).unwrap();
    for d in [0.0, 0.5, 1.0] {
        let y = sc.y_seminorm(&f, d, k).unwrap().value;
        let oracle = 2f64.powf(-d * k as f64 / 2.0) * 2f64.powf(m0 as f64 / 2.0) * fk.l2_norm();
        assert!((y / oracle - 1.0).abs() < 1e-2, "d {d}: {y} vs {oracle}");
        let y0 = sc.y_seminorm(&f, 0.0, k).unwrap().value;
        assert!((y / (2f64.powf(-d * k as f64 / 2.0) * y0) - 1.0).abs() < 1e-12);
        let dual = sc.y_dual_seminorm(&f, d, k).unwrap().value;
        let oracle = 2f64.powf(d * k as f64 / 2.0) * 2f64.powf(-m0 as f64 / 2.0) * fk.l2_norm();
        assert!((dual / oracle - 1.0).abs() < 1e-2);
        for gamma in [0.0, 0.5] {
            let full = sc.y_norm(&f, gamma, d).unwrap().value;
            let band = 2f64.powf(gamma * k as f64) * sc.y_seminorm(&f, d, k).unwrap().value;
            assert!((full / band - 1.0).abs() < 1e-6);
        }
    }
    let ys: Vec<f64> = [0.0, 0.25, 0.5, 1.0].iter().map(|&g| sc.y_norm(&f, g, 0.5).unwrap().value).collect();
    assert!(ys.windows(2).all(|w| w[0] <= w[1]));
    let low = ring_packet(spec, m0, 0.5, 0.0).scale(0.0);
    assert_eq!(sc.y_seminorm(&low, 0.5, k).unwrap().value, 0.0);
    assert_eq!(sc.y_norm(&SampledField::zeros(spec), 0.5, 0.5).unwrap().value, 0.0);
    assert_eq!(sc.y_dual_norm(&SampledField::zeros(spec), 0.5, 0.5).unwrap().value, 0.0);
}

#[test]
fn band_annulus_table_matches_direct_norms() {
    let spec = GridSpec::default_for(2).unwrap();
    let sc = scales(&spec);
    let f = sample_member(&TestFunctionFamily::default_for(2, 1).members[3], &spec, &Shaping::mean_free()).unwrap();
    let table = sc.band_annulus_table(&f).unwrap();
    for (gamma, d) in [(0.0, 0.0), (0.5, 1.0), (1.0, 0.5)] {
        let direct = sc.y_norm(&f, gamma, d).unwrap().value;
        assert!((table.y_norm(gamma, d) / direct - 1.0).abs() < 1e-12);
        let direct = sc.y_dual_norm(&f, gamma, d).unwrap().value;
        assert!((table.y_dual_norm(gamma, d) / direct - 1.0).abs() < 1e-12);
    }
}

#[test]
fn duality_pairing_is_uniformly_bounded() {
    let spec = GridSpec::default_for(1).unwrap();
    let sc = scales(&spec);
    let family = TestFunctionFamily::default_for(1, 3);
    let fields: Vec<SampledField> = family.members.iter().map(|m| sample_member(m, &spec, &Shaping::plain()).unwrap()).collect();
    let mut constants = Vec::new();
    for k in [-1, 0, 1] {
        for (i, f) in fields.iter().enumerate() {
            for (j, g) in fields.iter().enumerate() {
                if i == j {
                    continue;
                }
                let (fk, gk) = (sc.lp.project_band(f, k).unwrap(), sc.lp.project_band(g, k).unwrap());
                let pairing = quadrature_integral(&fk.zip(&gk, |a, b| a * b.conj()).unwrap()).norm();
                let bound = sc.y_seminorm(f, 0.5, k).unwrap().value * sc.y_dual_seminorm(g, 0.5, k).unwrap().value;
                if bound > 1e-12 && pairing > 1e-12 {
                    assert!(pairing <= 2.0 * bound);
                    constants.push(pairing / bound);
                }
            }
        }
    }
    let max = constants.iter().copied().fold(0.0, f64::max);
    assert!(max / median(&constants).unwrap() <= 3.0 || max <= 1.0, "max {max}");
}

#[test]
fn weighted_sobolev_sum_properties() {
    let spec = GridSpec::default_for(1).unwrap();
    let sc = scales(&spec);
    let f = gaussian(spec, 1.0);
    let plain = sc.annuli.weighted_sum(&f, |m| 2f64.powf(m as f64 / 2.0)).unwrap();
    let w = sc.weighted_sobolev_sum(&f, 0.5, 1.0).unwrap();
    assert!((w.value / plain.value - 1.0).abs() < 1e-12);
    assert_eq!(sc.weighted_sobolev_sum(&SampledField::zeros(spec), 0.5, 0.5).unwrap().value, 0.0);

    // f(2x): D^σ gains 2^σ, the L² norm 2^{-1/2}, and the ladder shifts by one,
    // which costs 2^{-1/2} in the weight.
    let (gamma, d) = (0.5, 0.0);
    let sigma = gamma - d / 2.0;
    let g = gaussian(spec, 0.5);
    let a = sc.weighted_sobolev_sum(&f, gamma, d).unwrap();
    let b = sc.weighted_sobolev_sum(&g, gamma, d).unwrap();
    let predicted = 2f64.powf(sigma - 1.0) * (a.value + a.tail_estimate);
    assert!(((b.value + b.tail_estimate) / predicted - 1.0).abs() < 0.05);
}

#[test]
fn lip_and_holder() {
    let spec = GridSpec::default_for(1).unwrap();
    let sc = scales(&spec);
    for j in [-1, 0, 2] {
        let xi = 2f64.powi(j);
        let w = SampledField::from_fn(spec, |x| Complex64::from_polar(1.0, 2.0 * PI * xi * x[0])).unwrap();
        assert!(sc.lip_s_norm(&w, 0.5).unwrap() >= 2f64.powf(0.5 * j as f64) * (1.0 - 1e-12));
    }
    assert_eq!(sc.lip_s_norm(&SampledField::zeros(spec), 0.5).unwrap(), 0.0);

    let sampling = PairSampling { random_pairs: 20_000, ..PairSampling::default() };
    let family = TestFunctionFamily::default_for(1, 2);
    // Equivalence up to a convention-dependent constant: some C puts every
    // ratio / C inside [1/5, 5].
    for s in [0.25, 0.5, 0.75] {
        let ratios: Vec<f64> = family
            .members
            .iter()
            .map(|m| {
                let f = sample_member(m, &spec, &Shaping::plain()).unwrap();
                sc.lip_s_norm(&f, s).unwrap() / holder_seminorm(&f, s, &sampling).unwrap()
            })
            .collect();
        let max = ratios.iter().copied().fold(0.0, f64::max);
        let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(min > 0.0 && max / min <= 25.0, "s {s}: {ratios:?}");
    }

    let c = SampledField::constant(spec, Complex64::new(1.0, 0.0));
    assert_eq!(holder_seminorm(&c, 0.5, &sampling).unwrap(), 0.0);
    let kink = SampledField::from_real_fn(spec, |x| x[0].abs().min(1.0).sqrt()).unwrap();
    let hs: Vec<f64> = [0.25, 0.5, 0.75].iter().map(|&s| holder_seminorm(&kink, s, &sampling).unwrap()).collect();
    assert!(hs.iter().all(|v| v.is_finite()));
    assert!(hs[0] <= hs[1] * (1.0 + 1e-9) && hs[1] < hs[2], "{hs:?}");
    let scaled = holder_seminorm(&kink.scale(3.0), 0.5, &sampling).unwrap();
    assert!((scaled / hs[1] - 3.0).abs() < 1e-9);
}
