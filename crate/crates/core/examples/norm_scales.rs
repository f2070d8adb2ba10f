//! The annulus-weighted norm scales of one test function, as printed by
//! `lplab norms`.

use lplab::cli::norm_table;
use lplab::harness::{sample_member, Shaping, TestFunctionFamily};
use lplab::GridSpec;

fn main() -> lplab::Result<()> {
    let spec = GridSpec::default_for(1)?;
    let family = TestFunctionFamily::default_for(1, 7);
    let member = &family.members[3];
    let f = sample_member(member, &spec, &Shaping::mean_free())?;
    println!("{} (mean free)", member.name);
    for row in norm_table(&f)? {
        println!("{:<22} {:<24} {:>12.6e}  tail {:.1e}", row.norm, row.params, row.value, row.tail_estimate);
    }
    Ok(())
}
