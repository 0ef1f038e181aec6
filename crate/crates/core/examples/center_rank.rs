//! Dimension of the span of the determinant coefficients as z varies.

use elliptic_center::algebra::{center_rank, LatticePoint};
use elliptic_center::{DynWeight, ModularParams, C64};

fn main() -> elliptic_center::Result<()> {
    for n in [2, 3] {
        let p = ModularParams::defaults(n)?;
        let pt = LatticePoint::new(DynWeight::new((0..n as i64).collect()), DynWeight::new(vec![1; n]));
        for m in [1, 3 * n, 5 * n] {
            let zs: Vec<C64> = (0..m).map(|k| C64::new(0.09 * k as f64 - 0.4, 0.05 * (k % 4) as f64 - 0.1)).collect();
            let r = center_rank(&zs, &p, &pt)?;
            println!("n = {n}, {m:>2} samples: rank {}", r.rank);
        }
    }
    Ok(())
}
