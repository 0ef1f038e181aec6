//! Odd theta function, characteristics and the two quasi-periodicity laws.

use elliptic_center::theta::{theta_eval, theta_slot};
use elliptic_center::{ModularParams, ThetaChar, C64};

fn main() -> elliptic_center::Result<()> {
    let p = ModularParams::defaults(3)?;
    let z = C64::new(0.23, -0.11);
    println!("sigma(z)  = {:.12}", p.sigma(z));
    println!("sigma(-z) = {:.12}", p.sigma(-z));

    let odd = ThetaChar::odd();
    let i_pi = C64::new(0.0, std::f64::consts::PI);
    let t = theta_eval(&odd, z, p.tau, p.tol_series)?;
    let shifted = theta_eval(&odd, z + p.tau, p.tau, p.tol_series)?;
    let phase = (-i_pi * p.tau - 2.0 * i_pi * (z + 0.5)).exp();
    println!("z -> z + tau: |lhs - phase rhs| = {:.2e}", (shifted - phase * t).norm());

    for j in 0..p.n {
        let ch = theta_slot(j, &p)?;
        let v = theta_eval(&ch, z, p.tau * p.n as f64, p.tol_series)?;
        println!("slot {j}: characteristic ({}, {}), value {v:.10}", ch.a_char, ch.b_char);
    }
    Ok(())
}
