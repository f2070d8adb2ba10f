//! `[P_k, f] g` through the band multiplier and through the kernel form,
//! and how its size falls off with `k` for a smooth `f`.

use lplab::commutator::{interaction_split, kernel_commutator, lp_commutator};
use lplab::{CutoffProfile, GridSpec, LittlewoodPaley, SampledField};

fn main() -> lplab::Result<()> {
    let spec = GridSpec::default_for(1)?;
    let lp = LittlewoodPaley::new(CutoffProfile::default());
    let f = SampledField::from_real_fn(spec, |x| (-(x[0] - 0.5).powi(2)).exp())?;
    let g = SampledField::from_real_fn(spec, |x| (-(x[0] + 0.5).powi(2) / 2.0).exp() * (4.0 * x[0]).cos())?;

    println!("   k   |[P_k,f]g|_2   kernel-route difference");
    for k in -3..=1 {
        let c = lp_commutator(&lp, &f, &g, k)?;
        let kernel = lp.lp_kernel(k, &spec, 1e-4)?;
        let via_kernel = kernel_commutator(&kernel, &f, &g)?.scale(-1.0);
        println!("{k:4}   {:.6e}   {:.1e}", c.l2_norm(), via_kernel.sub(&c)?.l2_norm() / c.l2_norm());
    }

    let split = interaction_split(&lp, &g, 0, 1, 3, 0.5)?;
    let n = split.norms();
    println!("\nsplit at k=0, m=1: high-low {:.3e}  mid {:.3e}  high-high {:.3e}", n.high_low, n.mid, n.high_high);
    Ok(())
}
