//! Split a rough field into dyadic frequency bands and check that the pieces
//! add back up.

use lplab::spectral::resolvable_range;
use lplab::{CutoffProfile, GridSpec, LittlewoodPaley, SampledField};

fn main() -> lplab::Result<()> {
    let spec = GridSpec::default_for(1)?;
    let f = SampledField::from_real_fn(spec, |x| (-x[0].abs()).exp())?;
    let lp = LittlewoodPaley::new(CutoffProfile::default());
    let (lo, hi) = resolvable_range(&spec);

    let mut sum = lp.project_below(&f, lo)?;
    println!("band   L2 norm");
    println!("<={lo:<3} {:.6}", sum.l2_norm());
    for k in lo + 1..=hi {
        let band = lp.project_band(&f, k)?;
        println!("{k:>4}   {:.6}", band.l2_norm());
        sum = sum.add(&band)?;
    }
    let rest = f.sub(&lp.project_below(&f, hi)?)?;
    println!(" >{hi:<3} {:.6}", rest.l2_norm());
    let err = sum.add(&rest)?.sub(&f)?.l2_norm() / f.l2_norm();
    println!("reconstruction error {err:.2e}");
    Ok(())
}
