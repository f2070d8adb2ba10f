//! Annulus masses of kernels against the decay `2^{-j(ε+s)}`.

use lplab::harness::suites::sample_kernel;
use lplab::harness::KernelChoice;
use lplab::spectral::verify_kernel_hypothesis;
use lplab::{CutoffProfile, GridSpec, LittlewoodPaley};

fn main() -> lplab::Result<()> {
    let spec = GridSpec::new(1, 8192, 64.0)?;
    let lp = LittlewoodPaley::new(CutoffProfile::default());
    let (s, eps) = (0.2, 0.2);
    for choice in [KernelChoice::Littlewood { k: 0 }, KernelChoice::PowerTail { decay: 0.9 }, KernelChoice::PowerTail { decay: 0.3 }] {
        let p = sample_kernel(&choice, &spec, &lp, 1.0)?;
        let rep = verify_kernel_hypothesis(&p, s, eps)?;
        println!("{choice:?}: {}", if rep.pass { "PASS" } else { "FAIL" });
        println!("  unit ball mass {:.4}, tail growth {:+.3} per annulus", rep.unit_ball_mass, rep.tail_growth);
        for (j, m) in &rep.annulus_masses {
            println!("  j = {j:<2} mass {m:.3e}  weighted {:.3e}", m * 2f64.powf(*j as f64 * (s + eps)));
        }
    }
    Ok(())
}
