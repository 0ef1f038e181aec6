//! Select the L-operator convention and check the dynamical Yang-Baxter
//! relation family by family.

use elliptic_center::qdet::{calibrate, check_dybr};
use elliptic_center::sampling::SampleStream;
use elliptic_center::ModularParams;

fn main() -> elliptic_center::Result<()> {
    let p = ModularParams::defaults(2)?;
    let (rep, cal) = calibrate(&p)?;
    for (conv, r) in &cal.candidates {
        let mark = if *conv == cal.convention { "*" } else { " " };
        println!("{mark} {conv:<55} {r:.2e}");
    }
    for n in [2, 3] {
        let p = ModularParams::defaults(n)?;
        let (rep_n, _) = calibrate(&p)?;
        let report = check_dybr(&rep_n, 10, &SampleStream::new(1, "dybr"))?;
        println!("n = {n}: overall {:.2e}", report.overall.max_residual);
        for (family, r) in &report.families {
            println!("    {:<15} {:.2e}", family.name(), r.max_residual);
        }
    }
    println!("selected: {}", rep.convention());
    Ok(())
}
