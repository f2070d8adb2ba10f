mod common;

use std::f64::consts::PI;

use common::{band_limited, gaussian, rel};
use lplab::realspace::*;
use lplab::*;
use num_complex::Complex64;

#[test]
fn maximal_function_examples() {
    let spec = GridSpec::default_for(1).unwrap();
    let policy = RadiiPolicy::default();
    let c = SampledField::constant(spec, Complex64::new(-1.5, 0.0));
    let mc = maximal_function(&c, &policy).unwrap();
    assert!(mc.values().iter().all(|v| (v.re - 1.5).abs() < 1e-12));

    let g = gaussian(spec, 1.0);
    let mg = maximal_function(&g, &policy).unwrap();
    let o = spec.origin_index();
    assert!((mg.values()[o].re - g.values()[o].re).abs() < 1e-12);

    let step = SampledField::from_real_fn(spec, |x| if (0.0..=1.0).contains(&x[0]) { 1.0 } else { 0.0 }).unwrap();
    let ms = maximal_function(&step, &policy).unwrap();
    // Brute-force oracle: average over [x − r, x + r] on a dense radius grid.
    let dense = |x: f64| {
        (1..=20_000)
            .map(|j| j as f64 * 1e-3)
            .map(|r| ((x + r).min(1.0) - (x - r).max(0.0)).max(0.0) / (2.0 * r))
            .fold(0.0, f64::max)
    };
    let at = |m: &SampledField, x: f64| m.values()[((x + spec.half_width()) / spec.spacing()).round() as usize].re;
    // The best radius is x: on the ladder at 2 and 4, between rungs at 3,
    // where the ladder may lose up to its ratio.
    for x in [2.0, 4.0] {
        assert!((dense(x) - 1.0 / (2.0 * x)).abs() < 1e-3);
        assert!((at(&ms, x) / dense(x) - 1.0).abs() < 0.05, "x = {x}");
    }
    let v = at(&ms, 3.0);
    assert!(v <= dense(3.0) * 1.05 && v >= dense(3.0) / std::f64::consts::SQRT_2 * 0.95);
    let fine = maximal_function(&step, &RadiiPolicy { ratio: 1.02, ..RadiiPolicy::default() }).unwrap();
    assert!((at(&fine, 3.0) / dense(3.0) - 1.0).abs() < 0.05);
    assert!(RadiiPolicy { ratio: 1.0, ..RadiiPolicy::default() }.radii(&spec).is_err());
}

#[test]
fn riesz_potential_algebra() {
    let spec = GridSpec::default_for(1).unwrap();
    let f = band_limited(spec, 4.0, 2);
    for s in [0.25, 0.5, 0.75] {
        let back = riesz_potential_spectral(&fractional_derivative(&f, s).unwrap(), s).unwrap();
        assert!(rel(&back, &f) <= 1e-10);
    }
    let a = riesz_potential_spectral(&riesz_potential_spectral(&f, 0.2).unwrap(), 0.3).unwrap();
    assert!(rel(&a, &riesz_potential_spectral(&f, 0.5).unwrap()) <= 1e-10);
    let g = band_limited(spec, 4.0, 3);
    let lin = riesz_potential_spectral(&f.scale(2.0).add(&g).unwrap(), 0.4).unwrap();
    let parts = riesz_potential_spectral(&f, 0.4).unwrap().scale(2.0).add(&riesz_potential_spectral(&g, 0.4).unwrap()).unwrap();
    assert!(rel(&lin, &parts) <= 1e-12);
    assert!(riesz_potential_spectral(&f, 1.0).is_err());
    assert!(riesz_potential_spectral(&f, 0.0).is_err());
}

/// `ĝ = e^{−πw²ξ²}(1 − e^{−πa²ξ²})²` in physical space.
fn band_passed_gaussian(spec: GridSpec, w: f64, a: f64) -> SampledField {
    let g = |x: f64, sigma: f64| (-PI * x * x / (sigma * sigma)).exp() / sigma;
    SampledField::from_real_fn(spec, |x| {
        g(x[0], w) - 2.0 * g(x[0], (w * w + a * a).sqrt()) + g(x[0], (w * w + 2.0 * a * a).sqrt())
    })
    .unwrap()
}

#[test]
fn riesz_kernel_route_reconstructs() {
    let spec = GridSpec::default_for(1).unwrap();
    let target = band_passed_gaussian(spec, 1.0, 1.0);
    let h = fractional_derivative(&target, 0.5).unwrap();
    let back = riesz_potential_kernel(&h, 0.5).unwrap();
    assert!(rel(&back, &target) <= 1e-2, "{}", rel(&back, &target));
    let zero = riesz_potential_kernel(&SampledField::zeros(spec), 0.5).unwrap();
    assert_eq!(zero.max_abs(), 0.0);
    // One dimension, s = 1/2 is self-dual: the constant is exactly 1.
    assert!((riesz_constant(0.5, 1) - 1.0).abs() < 1e-14);
    let c = fit_riesz_constant(&target, 0.5).unwrap();
    assert!((c - 1.0).abs() < 0.02);
}

#[test]
fn truncated_kernel_masses_scale() {
    let spec = GridSpec::new(1, 4096, 16.0).unwrap();
    let s = 0.5;
    // Radial integrals: ‖Φ₁‖₁ = 2(4R)^s/s, ‖Φ₂‖₁ = 2(4R)^{s−1}/(1−s).
    let phi1 = 2.0 * 4f64.powf(s) / s;
    let phi2 = 2.0 * 4f64.powf(s - 1.0) / (1.0 - s);
    for r in [0.25, 0.5, 1.0, 2.0] {
        let pair = build_truncated_kernels(r, s, &spec).unwrap();
        assert!((pair.phi1_scaled() / phi1 - 1.0).abs() < 0.03, "R {r}: {}", pair.phi1_scaled());
        assert!((pair.phi2_scaled() / phi2 - 1.0).abs() < 0.03, "R {r}: {}", pair.phi2_scaled());
        assert_eq!(pair.phi1.mul(&pair.phi2).unwrap().max_abs(), 0.0);
    }
    assert!(build_truncated_kernels(4.0, s, &spec).is_err());
    assert!(build_truncated_kernels(1.0, 1.5, &spec).is_err());
}

#[test]
fn radial_majorant_bound() {
    let spec = GridSpec::new(1, 512, 8.0).unwrap();
    let maximal = MaximalOperator::new(&spec, &RadiiPolicy::default()).unwrap();
    let gauss = gaussian(spec, 0.5);
    let g = band_limited(spec, 2.0, 9);
    assert!(radial_majorant_check(&gauss, &g, &maximal).unwrap() <= 1.05);
    let ball = ball_average_kernel(&spec, 1.0);
    assert!(radial_majorant_check(&ball, &g, &maximal).unwrap() <= 1.05);
    let one = SampledField::constant(spec, Complex64::new(1.0, 0.0));
    assert!((radial_majorant_check(&gauss, &one, &maximal).unwrap() - 1.0).abs() < 1e-12);
    let bump = SampledField::from_real_fn(spec, |x| if x[0].abs() > 1.0 && x[0].abs() < 2.0 { 1.0 } else { 0.0 }).unwrap();
    assert!(radial_majorant_check(&bump, &g, &maximal).is_err());
}

#[test]
fn holder_ratio_examples() {
    let sampling = PairSampling { random_pairs: 20_000, ..PairSampling::default() };
    let spec = GridSpec::default_for(1).unwrap();
    let maximal = MaximalOperator::new(&spec, &RadiiPolicy::default()).unwrap();
    let c = SampledField::constant(spec, Complex64::new(3.0, 0.0));
    assert_eq!(holder_ratio(&c, 0.5, &maximal, &sampling).unwrap().ratio, 0.0);

    let g = gaussian(spec, 1.0);
    let base = holder_ratio(&g, 0.5, &maximal, &sampling).unwrap();
    assert!(base.ratio.is_finite() && base.ratio > 0.0);
    assert!((base.ratio - base.numerator / base.denominator).abs() < 1e-12 * base.ratio);
    let scaled = holder_ratio(&g.scale(7.5), 0.5, &maximal, &sampling).unwrap();
    assert!((scaled.ratio / base.ratio - 1.0).abs() < 1e-10);

    let fine = GridSpec::new(1, 2048, 16.0).unwrap();
    let fine_max = MaximalOperator::new(&fine, &RadiiPolicy::default()).unwrap();
    let refined = holder_ratio(&gaussian(fine, 1.0), 0.5, &fine_max, &sampling).unwrap();
    assert!((refined.ratio / base.ratio - 1.0).abs() <= 0.1, "{} vs {}", refined.ratio, base.ratio);
    assert!(holder_ratio(&g, 1.0, &maximal, &sampling).is_err());
}
