//! The quantum determinant of the fundamental representation: scalar, and
//! central once dressed with the Delta ratio.

use elliptic_center::qdet::{calibrate, check_centrality};
use elliptic_center::sampling::SampleStream;
use elliptic_center::{DynWeight, ModularParams, C64};

fn main() -> elliptic_center::Result<()> {
    let p = ModularParams::defaults(3)?;
    let (rep, _) = calibrate(&p)?;
    let a = DynWeight::new(vec![0, 2, -1]);
    let z = C64::new(0.11, -0.05);
    let q = rep.dressed_qdet(&a, z)?;
    let diag: Vec<String> = q.diagonal_entries().iter().map(|d| format!("{d:.10}")).collect();
    println!("dressed determinant at a = {a}: diagonal {}", diag.join(", "));
    println!("off-diagonal part {:.1e}", q.max_off_diagonal());

    let r = check_centrality(&rep, 10, &SampleStream::new(3, "centrality"), 1e-8)?;
    println!("commutator with L: dressed {:.2e}, undressed {:.2e}", r.dressed.max_residual, r.undressed_max);
    Ok(())
}
