//! Sample a Gaussian, transform it, and compare with its closed-form
//! transform `exp(-π ξ²)`.

use std::f64::consts::PI;

use lplab::{forward_transform, inverse_transform, GridSpec, SampledField};

fn main() -> lplab::Result<()> {
    let spec = GridSpec::new(1, 1024, 16.0)?;
    let f = SampledField::from_real_fn(spec, |x| (-PI * x[0] * x[0]).exp())?;
    let f_hat = forward_transform(&f);

    println!("{:>8} {:>14} {:>14}", "xi", "computed", "exact");
    for m in [0i64, 4, 8, 16, 32] {
        let xi = m as f64 * spec.freq_step();
        println!("{xi:8.4} {:14.10} {:14.10}", f_hat.at(&[m]).re, (-PI * xi * xi).exp());
    }

    let back = inverse_transform(&f_hat);
    let err = back.sub(&f)?.l2_norm() / f.l2_norm();
    println!("round trip relative error {err:.2e}");
    Ok(())
}
