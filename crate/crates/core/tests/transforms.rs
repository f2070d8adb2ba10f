mod common;

use std::f64::consts::PI;

use common::{noise, rel, simpson};
use lplab::grid::SpectralField;
use lplab::*;
use num_complex::Complex64;

#[test]
fn constant_has_single_coefficient() {
    for dim in [1, 2] {
        let spec = GridSpec::new(dim, 32, 3.0).unwrap();
        let f = SampledField::constant(spec, Complex64::new(1.0, 0.0));
        let ff = forward_transform(&f);
        let mass = 6f64.powi(dim as i32);
        let zero = vec![0i64; dim];
        assert!((ff.at(&zero) - mass).norm() < 1e-12 * mass);
        let rest: f64 = ff.coeffs().iter().map(|c| c.norm()).sum::<f64>() - ff.at(&zero).norm();
        assert!(rest < 1e-10);
    }
}

#[test]
fn plane_wave_is_orthogonal_to_other_modes() {
    let spec = GridSpec::new(1, 64, 4.0).unwrap();
    let j0 = 5i64;
    let xi0 = j0 as f64 * spec.freq_step();
    let f = SampledField::from_fn(spec, |x| Complex64::from_polar(1.0, 2.0 * PI * xi0 * x[0])).unwrap();
    let ff = forward_transform(&f);
    assert!((ff.at(&[j0]) - 8.0).norm() < 1e-12);
    for j in -31..32 {
        if j != j0 {
            assert!(ff.at(&[j]).norm() < 1e-11, "mode {j}");
        }
    }
}

#[test]
fn gaussian_is_its_own_transform() {
    let spec = GridSpec::new(1, 512, 16.0).unwrap();
    let ff = forward_transform(&common::gaussian(spec, 1.0));
    let mut worst: f64 = 0.0;
    for j in -40..=40i64 {
        let xi = j as f64 * spec.freq_step();
        // Independent oracle: Simpson quadrature of the cosine transform.
        let oracle = 2.0 * simpson(|x| (-PI * x * x).exp() * (2.0 * PI * x * xi).cos(), 0.0, 12.0, 24_000);
        worst = worst.max((ff.at(&[j]) - oracle).norm());
        assert!((oracle - (-PI * xi * xi).exp()).abs() < 1e-10);
    }
    assert!(worst < 1e-10, "max error {worst}");
}

#[test]
fn round_trip_and_zero() {
    for dim in [1, 2, 3] {
        let spec = GridSpec::new(dim, if dim == 3 { 16 } else { 64 }, 2.0).unwrap();
        let f = noise(spec, 11);
        assert!(rel(&inverse_transform(&forward_transform(&f)), &f) <= 1e-12);
        let z = inverse_transform(&SpectralField::zeros(spec));
        assert_eq!(z.max_abs(), 0.0);
    }
}

#[test]
fn single_coefficient_gives_plane_wave() {
    let spec = GridSpec::new(2, 32, 2.0).unwrap();
    let mut s = SpectralField::zeros(spec);
    s.set(&[3, -2], Complex64::new(16.0, 0.0));
    let f = inverse_transform(&s);
    let step = spec.freq_step();
    let expect =
        SampledField::from_fn(spec, |x| Complex64::from_polar(1.0, 2.0 * PI * step * (3.0 * x[0] - 2.0 * x[1]))).unwrap();
    assert!(rel(&f, &expect) < 1e-12);
}

#[test]
fn quadrature_integrals() {
    let spec = GridSpec::new(1, 256, 8.0).unwrap();
    let one = SampledField::constant(spec, Complex64::new(1.0, 0.0));
    assert!((quadrature_integral(&one) - 16.0).norm() < 1e-12);
    assert!((quadrature_integral(&common::gaussian(spec, 1.0)) - 1.0).norm() < 1e-10);
    let odd = SampledField::from_real_fn(spec, |x| x[0] * (-PI * x[0] * x[0]).exp()).unwrap();
    assert!(quadrature_integral(&odd).norm() < 1e-12);
    let spec2 = GridSpec::new(2, 128, 8.0).unwrap();
    assert!((quadrature_integral(&common::gaussian(spec2, 1.0)) - 1.0).norm() < 1e-10);
}

#[test]
fn grid_validation() {
    assert!(GridSpec::new(1, 24, 1.0).is_err());
    assert!(GridSpec::new(1, 8, 1.0).is_err());
    assert!(GridSpec::new(0, 32, 1.0).is_err());
    assert!(GridSpec::new(1, 32, -1.0).is_err());
    let spec = GridSpec::new(2, 64, 4.0).unwrap();
    assert_eq!(spec.len(), 4096);
    assert!((spec.spacing() - 0.125).abs() < 1e-15);
    assert!((spec.freq_step() - 0.125).abs() < 1e-15);
    assert!((spec.nyquist() - 4.0).abs() < 1e-15);
    assert!(SampledField::new(spec, vec![Complex64::new(f64::NAN, 0.0); 4096]).is_err());
    assert!(SampledField::new(spec, vec![Complex64::new(0.0, 0.0); 10]).is_err());
}
