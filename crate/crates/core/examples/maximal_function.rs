//! Centred maximal function of an interval indicator, and the pointwise
//! Hölder ratio that compares `|f(x) - f(y)|` with maximal averages of
//! `|D|^s f`.

use lplab::realspace::{holder_ratio, maximal_function, MaximalOperator, PairSampling, RadiiPolicy};
use lplab::{GridSpec, SampledField};

fn main() -> lplab::Result<()> {
    let spec = GridSpec::default_for(1)?;
    let indicator = SampledField::from_real_fn(spec, |x| if x[0].abs() <= 1.0 { 1.0 } else { 0.0 })?;
    // Radii run over a geometric ladder; a coarse ladder can miss the best
    // radius by up to its ratio.
    let coarse = maximal_function(&indicator, &RadiiPolicy::default())?;
    let fine = maximal_function(&indicator, &RadiiPolicy { ratio: 1.02, ..RadiiPolicy::default() })?;
    println!("   x   ratio 1.41  ratio 1.02     exact");
    for x in [0.0, 2.0, 3.0, 4.0, 6.0] {
        let i = ((x + spec.half_width()) / spec.spacing()).round() as usize;
        // Outside the interval the best ball reaches back to -1.
        let exact = if x <= 1.0 { 1.0 } else { 1.0 / (x + 1.0) };
        println!("{x:5.1}  {:10.4}  {:10.4}  {exact:8.4}", coarse.values()[i].re, fine.values()[i].re);
    }

    let maximal = MaximalOperator::new(&spec, &RadiiPolicy::default())?;
    let bump = SampledField::from_real_fn(spec, |x| (-x[0] * x[0]).exp() * (3.0 * x[0]).cos())?;
    for s in [0.25, 0.5, 0.75] {
        let hr = holder_ratio(&bump, s, &maximal, &PairSampling::default())?;
        println!("s = {s}: sup ratio {:.4}", hr.ratio);
    }
    Ok(())
}
