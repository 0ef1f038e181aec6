//! The antisymmetrizer on V^{⊗n} and both Cherednik products.

use elliptic_center::ops::{antisymmetrizer, cherednik, cherednik_residual, CherednikVariant};
use elliptic_center::{DynWeight, ModularParams};

fn main() -> elliptic_center::Result<()> {
    for n in 2..=4 {
        let proj = antisymmetrizer(n, n);
        let idem = (&proj.then(&proj) - &proj).max_abs();
        println!("n = {n}: |P^2 - P| = {idem:.1e}, trace = {:.12}", proj.trace().re);
        let p = ModularParams::defaults(n)?;
        let wt = DynWeight::new((0..n as i64).map(|k| k - 1).collect());
        for v in CherednikVariant::ALL {
            let a = cherednik(&wt, &p, v)?;
            println!("    {:<8} |A P - A| = {:.2e}", v.name(), cherednik_residual(&a));
        }
    }
    Ok(())
}
