//! `|D|^s` of a plane wave is `|ξ|^s` times the wave; on a Gaussian the
//! result converges as the box grows.

use std::f64::consts::PI;

use lplab::{fractional_derivative, GridSpec, SampledField};
use num_complex::Complex64;

fn main() -> lplab::Result<()> {
    let spec = GridSpec::default_for(1)?;
    let xi = 2.0;
    let wave = SampledField::from_fn(spec, |x| Complex64::from_polar(1.0, 2.0 * PI * xi * x[0]))?;
    for s in [0.25, 0.5, 1.0, 1.5] {
        let d = fractional_derivative(&wave, s)?;
        let gain = d.l2_norm() / wave.l2_norm();
        println!("s = {s:<4}  gain {gain:.12}  expected {:.12}", xi.powf(s));
    }

    println!("\n|D|^0.5 of a Gaussian at x = 0 as the box grows:");
    for half_width in [8.0, 16.0, 32.0, 64.0] {
        let spec = GridSpec::new(1, (64.0 * half_width) as usize, half_width)?;
        let g = SampledField::from_real_fn(spec, |x| (-PI * x[0] * x[0]).exp())?;
        let d = fractional_derivative(&g, 0.5)?;
        println!("L = {half_width:>4}  {:.8}", d.values()[spec.samples() / 2].re);
    }
    Ok(())
}
