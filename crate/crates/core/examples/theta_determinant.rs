//! The determinant of slot theta functions divided by sigma products does not
//! depend on the points, including at the specialized points of a weight.

use elliptic_center::fusion::{specialized_points, theta_det_ratio};
use elliptic_center::{DynWeight, ModularParams, C64};

fn main() -> elliptic_center::Result<()> {
    for n in [2, 3] {
        let p = ModularParams::defaults(n)?;
        let tuples: Vec<Vec<C64>> = (0..3)
            .map(|s| (0..n).map(|k| C64::new(0.13 * (k * k + s) as f64 - 0.21, 0.07 * (k as f64 - 0.4 * s as f64) + 0.03)).collect())
            .collect();
        println!("n = {n}");
        for zs in &tuples {
            println!("    generic     {:.12}", theta_det_ratio(zs, &p)?);
        }
        let pts = specialized_points(&DynWeight::new((0..n as i64).collect()), C64::new(0.13, 0.02), &p);
        println!("    specialized {:.12}", theta_det_ratio(&pts, &p)?);
    }
    Ok(())
}
