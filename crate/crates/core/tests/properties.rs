//! Randomised algebraic invariants on small grids.

use lplab::norms::lp_norm;
use lplab::spectral::{remove_mean, resolvable_range};
use lplab::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn field(dim: usize, values: &[(f64, f64)]) -> SampledField {
    let spec = GridSpec::new(dim, if dim == 1 { 64 } else { 32 }, 4.0).unwrap();
    SampledField::new(spec, values[..spec.len()].iter().map(|&(a, b)| Complex64::new(a, b)).collect()).unwrap()
}

fn values() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1024)
}

fn rel(a: &SampledField, b: &SampledField) -> f64 {
    a.sub(b).unwrap().l2_norm() / b.l2_norm().max(1e-300)
}

fn lp() -> LittlewoodPaley {
    LittlewoodPaley::new(CutoffProfile::default())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parseval_holds(v in values(), dim in 1usize..=2) {
        let f = field(dim, &v);
        let ff = forward_transform(&f);
        let dxi = f.spec().freq_step().powi(dim as i32);
        let energy: f64 = ff.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>() * dxi;
        prop_assert!((energy / f.l2_norm().powi(2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn band_projection_is_linear(u in values(), v in values(), a in -3.0..3.0f64, k in -1i32..=0) {
        let (f, g) = (field(1, &u), field(1, &v));
        let lhs = lp().project_band(&f.scale(a).add(&g).unwrap(), k).unwrap();
        let rhs = lp().project_band(&f, k).unwrap().scale(a).add(&lp().project_band(&g, k).unwrap()).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().l2_norm() <= 1e-12 * (1.0 + rhs.l2_norm()));
    }

    #[test]
    fn bands_below_telescope(v in values(), dim in 1usize..=2) {
        let f = field(dim, &v);
        let (lo, hi) = resolvable_range(&f.spec());
        let mut sum = lp().project_below(&f, lo).unwrap();
        for k in lo + 1..=hi {
            sum = sum.add(&lp().project_band(&f, k).unwrap()).unwrap();
        }
        prop_assert!(rel(&sum, &lp().project_below(&f, hi).unwrap()) < 1e-12);
    }

    #[test]
    fn fractional_derivatives_compose(v in values(), a in -0.4..1.0f64, b in 0.0..1.0f64) {
        let f = remove_mean(&field(1, &v));
        let two = fractional_derivative(&fractional_derivative(&f, a).unwrap(), b).unwrap();
        let one = fractional_derivative(&f, a + b).unwrap();
        prop_assert!(rel(&two, &one) < 1e-10);
    }

    #[test]
    fn lp_norms_are_homogeneous(v in values(), c in 0.01..100.0f64, p in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0, f64::INFINITY])) {
        let f = field(1, &v);
        let scaled = lp_norm(&f.scale(c), p).unwrap();
        prop_assert!((scaled / (c * lp_norm(&f, p).unwrap()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn translation_commutes_with_projection(v in values(), shift in 0usize..64, k in -1i32..=0) {
        let f = field(1, &v);
        let roll = |g: &SampledField| {
            let mut vals = g.values().to_vec();
            vals.rotate_right(shift);
            SampledField::new(*g.spec(), vals).unwrap()
        };
        let a = lp().project_band(&roll(&f), k).unwrap();
        let b = roll(&lp().project_band(&f, k).unwrap());
        prop_assert!(a.sub(&b).unwrap().l2_norm() <= 1e-12 * (1.0 + b.l2_norm()));
    }
}
