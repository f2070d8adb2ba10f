mod common;

use std::f64::consts::PI;

use common::{band_limited, gaussian, noise, rel};
use lplab::commutator::*;
use lplab::norms::DyadicAnnulusDecomposition;
use lplab::spectral::{resolvable_range, verify_kernel_hypothesis};
use lplab::*;
use num_complex::Complex64;

fn lp() -> LittlewoodPaley {
    LittlewoodPaley::new(CutoffProfile::default())
}

fn spec1() -> GridSpec {
    GridSpec::default_for(1).unwrap()
}

#[test]
fn constant_multiplier_commutes() {
    let spec = spec1();
    let c = SampledField::constant(spec, Complex64::new(2.5, 0.0));
    let g = band_limited(spec, 4.0, 3);
    let h = lp().lp_kernel(0, &spec, 1.0).unwrap();
    for k in [-2, 0, 2] {
        let comm = lp_commutator(&lp(), &c, &g, k).unwrap();
        assert!(comm.l2_norm() <= 1e-13 * g.l2_norm(), "k {k}");
    }
    assert!(kernel_commutator(&h, &c, &g).unwrap().l2_norm() <= 1e-13 * g.l2_norm());
}

#[test]
fn commutator_with_one_is_the_projection() {
    let spec = spec1();
    let f = band_limited(spec, 4.0, 5);
    let one = SampledField::constant(spec, Complex64::new(1.0, 0.0));
    for k in [-1, 1] {
        let comm = lp_commutator(&lp(), &f, &one, k).unwrap();
        assert!(rel(&comm, &lp().project_band(&f, k).unwrap()) < 1e-12);
    }
}

#[test]
fn definition_and_bilinearity() {
    let spec = spec1();
    let (f1, f2) = (band_limited(spec, 3.0, 1), band_limited(spec, 3.0, 2));
    let (g1, g2) = (band_limited(spec, 4.0, 3), band_limited(spec, 4.0, 4));
    let k = 1;
    let lp = lp();
    let comm = lp_commutator(&lp, &f1, &g1, k).unwrap();
    let rebuilt = comm.add(&dealiased_product(&f1, &lp.project_band(&g1, k).unwrap()).unwrap()).unwrap();
    let direct = lp.project_band(&dealiased_product(&f1, &g1).unwrap(), k).unwrap();
    assert!(rel(&rebuilt, &direct) < 1e-12);

    let (a, b) = (0.7, -1.3);
    let mix = |u: &SampledField, v: &SampledField| u.scale(a).add(&v.scale(b)).unwrap();
    let h = gaussian(spec, 0.5);
    let lhs = lp_commutator(&lp, &mix(&f1, &f2), &g1, k).unwrap();
    let rhs = mix(&lp_commutator(&lp, &f1, &g1, k).unwrap(), &lp_commutator(&lp, &f2, &g1, k).unwrap());
    assert!(rel(&lhs, &rhs) < 1e-12);
    let lhs = lp_commutator(&lp, &f1, &mix(&g1, &g2), k).unwrap();
    let rhs = mix(&lp_commutator(&lp, &f1, &g1, k).unwrap(), &lp_commutator(&lp, &f1, &g2, k).unwrap());
    assert!(rel(&lhs, &rhs) < 1e-12);
    let lhs = kernel_commutator(&h, &mix(&f1, &f2), &g1).unwrap();
    let rhs = mix(&kernel_commutator(&h, &f1, &g1).unwrap(), &kernel_commutator(&h, &f2, &g1).unwrap());
    assert!(rel(&lhs, &rhs) < 1e-12);
}

#[test]
fn near_delta_kernel() {
    let spec = spec1();
    let dx = spec.spacing();
    let f = SampledField::from_real_fn(spec, |x| (-PI * x[0] * x[0]).exp() * (2.0 * PI * x[0]).cos()).unwrap();
    let g = gaussian(spec, 2.0);
    // Unit-mass cells at x = 0 and x = Δx.
    for (cell, bound) in [(spec.samples() / 2, 1e-12), (spec.samples() / 2 + 1, 0.0)] {
        let mut values = vec![Complex64::new(0.0, 0.0); spec.len()];
        values[cell] = Complex64::new(1.0 / dx, 0.0);
        let h = SampledField::new(spec, values).unwrap();
        let out = kernel_commutator(&h, &f, &g).unwrap().max_abs();
        // |f(x) − f(x − Δx)| ≤ Δx ‖f'‖∞, and ‖f'‖∞ ≤ 2π + √(2π/e) for this f.
        let lipschitz = 2.0 * PI + (2.0 * PI / std::f64::consts::E).sqrt();
        let limit = if bound > 0.0 { bound } else { dx * lipschitz };
        assert!(out <= limit, "cell {cell}: {out} > {limit}");
        if bound == 0.0 {
            assert!(out > 1e-3 * limit);
        }
    }
}

#[test]
fn annulus_pieces_of_a_kernel() {
    let spec = spec1();
    let lp = lp();
    let p = lp.lp_kernel(0, &spec, 1.0).unwrap();
    let pieces = annulus_decompose_kernel(&lp, &p, 1.0).unwrap();
    let mut sum = SampledField::zeros(spec);
    for q in &pieces {
        sum = sum.add(q).unwrap();
    }
    assert!(sum.sub(&p).unwrap().max_abs() <= 1e-12 * p.max_abs());
    assert!(support_radius(&pieces[0], 0.0) <= 2.0);
    for (j, q) in pieces.iter().enumerate().skip(1) {
        let r = support_radius(q, 0.0);
        assert!(r <= 2f64.powi(j as i32 + 1) + 1e-12);
    }
    assert!(verify_kernel_hypothesis(&p, 0.5, 0.5).unwrap().pass);

    let bump = SampledField::from_real_fn(spec, |x| {
        let r = x[0].abs();
        if r < 1.0 { (-1.0 / (1.0 - r * r)).exp() } else { 0.0 }
    })
    .unwrap();
    let pieces = annulus_decompose_kernel(&lp, &bump, 1.0).unwrap();
    assert!(pieces.len() > 3);
    for q in &pieces[2..] {
        assert_eq!(q.max_abs(), 0.0);
    }
    assert!(annulus_decompose_kernel(&lp, &bump, 0.0).is_err());
}

#[test]
fn interaction_split_reconstructs() {
    let lp = lp();
    for dim in [1, 2] {
        let spec = GridSpec::default_for(dim).unwrap();
        let g = band_limited(spec, 0.9 * spec.nyquist(), 11);
        let (lo, hi) = resolvable_range(&spec);
        for (k, m) in [(lo + 1, 0), (hi, 2), ((lo + hi) / 2, 1)] {
            let split = interaction_split(&lp, &g, k, m, 3, 0.5).unwrap();
            let mask = DyadicAnnulusDecomposition::annulus_mask(&spec, &lp.cutoff, m);
            let direct = mask_commutator_tilde(&lp, &mask, &g, k, 0.5).unwrap();
            assert!(rel(&split.total().unwrap(), &direct) < 1e-10, "dim {dim} k {k} m {m}");
        }
    }
    let spec = spec1();
    assert!(interaction_split(&lp, &noise(spec, 1), 0, 1, 2, 0.5).is_err());
    assert!(interaction_split(&lp, &noise(spec, 1), 40, 1, 3, 0.5).is_err());
}

#[test]
fn interaction_split_of_a_mid_band_field() {
    let spec = spec1();
    let lp = lp();
    let k = 0;
    let g = SampledField::from_real_fn(spec, |x| (2.0 * PI * x[0]).cos() + 0.5 * (2.0 * PI * 1.5 * x[0]).sin()).unwrap();
    let split = interaction_split(&lp, &g, k, 1, 3, 0.5).unwrap();
    let norms = split.norms();
    assert!(norms.high_low <= 1e-12 * g.l2_norm());
    assert!(norms.high_high <= 1e-12 * g.l2_norm());
    assert!(norms.mid > 0.0);
}

#[test]
fn high_high_term_decays_with_separation() {
    let spec = spec1();
    let lp = lp();
    let g = noise(spec, 9);
    let g = grid::apply_radial_multiplier(&g, |r| if r < spec.nyquist() { 1.0 } else { 0.0 });
    let hh: Vec<f64> = (3..=6).map(|n| interaction_split(&lp, &g, -2, 1, n, 0.5).unwrap().norms().high_high).collect();
    assert!(hh[0] > 0.0);
    for w in hh.windows(2) {
        assert!(w[1] <= 1.2 * w[0], "{hh:?}");
    }
}

#[test]
fn kernel_commutator_matches_direct_summation() {
    // Periodic lattice sum of h(y)(f(x) − f(x−y))g(x−y), no FFTs.
    let spec = GridSpec::new(1, 128, 8.0).unwrap();
    let n = spec.samples();
    let dx = spec.spacing();
    let f = SampledField::from_real_fn(spec, |x| (-PI * (x[0] - 0.5).powi(2)).exp()).unwrap();
    let g = SampledField::from_real_fn(spec, |x| (-PI * (x[0] + 0.5).powi(2)).exp()).unwrap();
    let h = SampledField::from_real_fn(spec, |x| (-PI * x[0] * x[0] / 4.0).exp() * x[0]).unwrap();
    let (fv, gv, hv) = (f.values(), g.values(), h.values());
    let direct: Vec<Complex64> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    // y_j = (j − n/2) Δx, so x_i − y_j sits at index i − j + n/2.
                    let t = (i + n + n / 2 - j) % n;
                    hv[j] * (fv[i] - fv[t]) * gv[t] * dx
                })
                .sum()
        })
        .collect();
    let direct = SampledField::new(spec, direct).unwrap();
    let fast = kernel_commutator(&h, &f, &g).unwrap();
    assert!(rel(&fast, &direct) < 1e-10, "{}", rel(&fast, &direct));
}
