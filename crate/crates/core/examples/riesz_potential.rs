//! The Riesz potential `|D|^{-s}` computed by a Fourier multiplier and by
//! convolution with `c |x|^{s-n}`, and the constant `c` recovered by a fit.

use std::f64::consts::PI;

use lplab::realspace::{fit_riesz_constant, riesz_constant, riesz_potential_kernel, riesz_potential_spectral};
use lplab::spectral::remove_mean;
use lplab::{GridSpec, SampledField};

fn main() -> lplab::Result<()> {
    let spec = GridSpec::new(1, 4096, 64.0)?;
    let s = 0.5;
    let g = remove_mean(&SampledField::from_real_fn(spec, |x| (-PI * x[0] * x[0]).exp() * (2.0 * PI * x[0]).cos())?);
    let spectral = riesz_potential_spectral(&g, s)?;
    let kernel = riesz_potential_kernel(&g, s)?;
    println!("kernel vs spectral relative L2 difference {:.3e}", kernel.sub(&spectral)?.l2_norm() / spectral.l2_norm());
    println!("closed-form constant {:.6}", riesz_constant(s, 1));
    println!("fitted constant      {:.6}", fit_riesz_constant(&g, s)?);
    for s in [0.25, 0.5, 0.75] {
        println!("c({s}, n=2) = {:.6}", riesz_constant(s, 2));
    }
    Ok(())
}
