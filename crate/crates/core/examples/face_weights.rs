//! The face R-matrix: its value at z = 0, its degeneration at z = -w, and the
//! zero pattern.

use elliptic_center::face::{build_r, check_degeneration, ice_rule_violations};
use elliptic_center::{DynWeight, ModularParams, C64};

fn main() -> elliptic_center::Result<()> {
    let p = ModularParams::defaults(3)?;
    let wt = DynWeight::new(vec![2, -1, 0]);
    let z = C64::new(0.17, 0.04);
    let r = build_r(&wt, z, &p)?;
    println!("R(a|z) at a = {wt}, z = {z}");
    println!("  R^{{00}}_{{00}} = {:.8}", r.get(&[0, 0], &[0, 0]));
    for (i, j) in [(0, 1), (1, 2)] {
        println!(
            "  R^{{{i}{j}}}_{{{i}{j}}} = {:.8}   R^{{{j}{i}}}_{{{i}{j}}} = {:.8}",
            r.get(&[i, j], &[i, j]),
            r.get(&[i, j], &[j, i])
        );
    }
    println!("entries outside the allowed pattern: {}", ice_rule_violations(&r));

    let r0 = build_r(&wt, C64::new(0.0, 0.0), &p)?;
    println!("R(a|0)^{{10}}_{{01}} = {:.3}", r0.get(&[0, 1], &[1, 0]));
    println!("max |R + R P| at z = -w: {:.2e}", check_degeneration(&wt, &p)?.max_residual);
    Ok(())
}
