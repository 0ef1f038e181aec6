//! Fusion of a column of R-matrices and the projected quantum-determinant scalar.

use elliptic_center::fusion::{check_column_antisymmetry, dressed_ratios, qdet_matrix};
use elliptic_center::{DynWeight, ModularParams, C64};

fn main() -> elliptic_center::Result<()> {
    let p = ModularParams::defaults(3)?;
    let z = C64::new(-0.21, 0.06);
    for wt in [DynWeight::new(vec![1, 0, -1]), DynWeight::new(vec![-2, 2, 1])] {
        let anti = check_column_antisymmetry(&wt, z, &p)?;
        let q = qdet_matrix(&wt, z, &p)?;
        println!("a = {wt}: antisymmetry residual {:.2e}", anti.max_residual);
        for row in &q {
            let cells: Vec<String> = row.iter().map(|c| format!("{c:>28.10}")).collect();
            println!("    {}", cells.join(" "));
        }
        let rho = dressed_ratios(&wt, z, &p)?;
        let rho: Vec<String> = rho.iter().map(|r| format!("{r:.10}")).collect();
        println!("    dressed ratios {}", rho.join(", "));
    }
    Ok(())
}
