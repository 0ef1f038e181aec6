//! Fused column of `n` R-matrices sharing one auxiliary line, its
//! antisymmetrized projection, and the theta-function determinant identity.
//!
//! The column lives on `V^{⊗(n+1)}`: slots `0..n` carry the column indices and
//! slot `n` the auxiliary line that runs through every factor.

use nalgebra::DMatrix;

use crate::check::Residual;
use crate::error::{Error, Result};
use crate::face::{FaceModel, FaceWeights};
use crate::lattice::{abar, delta_product, DynWeight, GENERICITY_GUARD};
use crate::ops::{antisymmetrizer_on_leading, chain_operator, factorial, ChainFactor, Permutation};
use crate::tensor::{flat_index, DenseTensor};
use crate::theta::{theta_eval, theta_slot, ModularParams, C64};

/// Factors of the column: the `k`-th acts on `(k, n)` at `z + k w` with the
/// weight shifted by the outgoing indices of columns `0..k`.
pub fn column_factors(params: &ModularParams, z: C64) -> Vec<ChainFactor> {
    let n = params.n;
    (0..n)
        .map(|k| ChainFactor { first: k, second: n, z: z + params.w * k as f64, shift_slots: (0..k).collect() })
        .collect()
}

pub fn fused_column(wt: &DynWeight, z: C64, params: &ModularParams) -> Result<DenseTensor> {
    fused_column_with(&FaceWeights::new(params)?, wt, z, None)
}

/// Column built from an arbitrary face model. `drop_shift = Some(k)` evaluates
/// factor `k` at the unshifted weight, which is a negative control.
pub fn fused_column_with(
    model: &dyn FaceModel,
    wt: &DynWeight,
    z: C64,
    drop_shift: Option<usize>,
) -> Result<DenseTensor> {
    let params = model.params();
    let mut factors = column_factors(params, z);
    if let Some(k) = drop_shift {
        let f = factors
            .get_mut(k)
            .ok_or_else(|| Error::Index(format!("column factor {k} out of range")))?;
        f.shift_slots.clear();
    }
    chain_operator(model, wt, params.n + 1, &factors)
}

/// Antisymmetrizer on the column slots, identity on the auxiliary slot.
pub fn column_projector(n: usize) -> DenseTensor {
    antisymmetrizer_on_leading(n, n + 1, n)
}

/// `max |P X - P X P| / max |P X|`.
pub fn column_antisymmetry_residual(x: &DenseTensor) -> f64 {
    let n = x.n();
    let proj = column_projector(n);
    let px = proj.then(x);
    let pxp = px.then(&proj);
    let scale = px.max_abs();
    let diff = px.max_diff(&pxp);
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

pub fn check_column_antisymmetry(wt: &DynWeight, z: C64, params: &ModularParams) -> Result<Residual> {
    let x = fused_column(wt, z, params)?;
    Ok(Residual::new(column_antisymmetry_residual(&x), params.tol_residual))
}

/// Component of `P X P` with column indices `(0, 1, ..., n-1)` in and out and
/// auxiliary indices `j` in, `j_out` out.
pub fn projected_component(x: &DenseTensor, j: usize, j_out: usize) -> C64 {
    let n = x.n();
    let perms = Permutation::all(n);
    let norm = 1.0 / (factorial(n) * factorial(n)) as f64;
    let mut acc = C64::new(0.0, 0.0);
    for mu in &perms {
        let mut row: Vec<usize> = mu.images().to_vec();
        row.push(j);
        let r = flat_index(n, &row);
        for nu in &perms {
            let mut col: Vec<usize> = nu.images().to_vec();
            col.push(j_out);
            acc += x.at(r, flat_index(n, &col)) * (mu.sign() * nu.sign());
        }
    }
    acc * norm
}

pub fn qdet_scalar(wt: &DynWeight, z: C64, j: usize, j_out: usize, params: &ModularParams) -> Result<C64> {
    if j >= params.n || j_out >= params.n {
        return Err(Error::Index(format!("auxiliary index ({j}, {j_out}) out of range")));
    }
    Ok(projected_component(&fused_column(wt, z, params)?, j, j_out))
}

/// All `n x n` projected components from a single column evaluation, indexed `[j][j_out]`.
pub fn qdet_matrix(wt: &DynWeight, z: C64, params: &ModularParams) -> Result<Vec<Vec<C64>>> {
    let x = fused_column(wt, z, params)?;
    let n = params.n;
    Ok((0..n).map(|j| (0..n).map(|jo| projected_component(&x, j, jo)).collect()).collect())
}

/// `q_jj Δ(a) / Δ(a + e_j)` for every `j`; the values agree and do not depend on `a`.
pub fn dressed_ratios(wt: &DynWeight, z: C64, params: &ModularParams) -> Result<Vec<C64>> {
    let q = qdet_matrix(wt, z, params)?;
    let d = delta_product(wt, params)?;
    (0..params.n)
        .map(|j| Ok(q[j][j] * d / delta_product(&wt.shifted(j), params)?))
        .collect()
}

/// `det[θ_i(n z_k)] / (σ(Σz - (n-1)/2) Π_{i<j} σ(z_i - z_j))`, where `θ_i` has
/// characteristic `(1/2 - i/n, 1/2)` at modulus `n τ`.
pub fn theta_det_ratio(z_list: &[C64], params: &ModularParams) -> Result<C64> {
    let n = params.n;
    if z_list.len() != n {
        return Err(Error::Parameter(format!("expected {n} points, got {}", z_list.len())));
    }
    let big_tau = params.tau * n as f64;
    let mut m = DMatrix::<C64>::zeros(n, n);
    for (k, &zk) in z_list.iter().enumerate() {
        for i in 0..n {
            m[(k, i)] = theta_eval(&theta_slot(i, params)?, zk * n as f64, big_tau, params.tol_series)?;
        }
    }
    let total: C64 = z_list.iter().sum();
    let mut den = params.sigma(total - (n as f64 - 1.0) / 2.0);
    if den.norm() < GENERICITY_GUARD {
        return Err(Error::Genericity(format!("sigma of the shifted point sum is {den:e}")));
    }
    for i in 0..n {
        for j in i + 1..n {
            let s = params.sigma(z_list[i] - z_list[j]);
            if s.norm() < GENERICITY_GUARD {
                return Err(Error::Genericity(format!("points {i} and {j} coincide modulo the lattice")));
            }
            den *= s;
        }
    }
    Ok(m.determinant() / den)
}

/// Points with `n z_μ = z + n w abar_μ + (n-1) w`.
pub fn specialized_points(wt: &DynWeight, z: C64, params: &ModularParams) -> Vec<C64> {
    let n = params.n as f64;
    abar(wt, params)
        .into_iter()
        .map(|ab| (z + params.w * n * ab + params.w * (n - 1.0)) / n)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::face::build_r;

    /// Direct double loop over the internal auxiliary index.
    fn two_factor_oracle(wt: &DynWeight, z: C64, p: &ModularParams) -> DenseTensor {
        let r0 = build_r(wt, z, p).unwrap();
        DenseTensor::from_fn(2, 3, |lo, up| {
            let mut acc = C64::new(0.0, 0.0);
            for j1 in 0..2 {
                let r1 = build_r(&wt.shifted(up[0]), z + p.w, p).unwrap();
                acc += r0.get(&[lo[0], lo[2]], &[up[0], j1]) * r1.get(&[lo[1], j1], &[up[1], up[2]]);
            }
            acc
        })
    }

    #[test]
    fn rank_two_column_matches_oracle() {
        let p = ModularParams::defaults(2).unwrap();
        let wt = DynWeight::new(vec![1, -2]);
        let z = C64::new(0.19, -0.04);
        let x = fused_column(&wt, z, &p).unwrap();
        assert!(x.max_diff(&two_factor_oracle(&wt, z, &p)) < 1e-14);
    }

    #[test]
    fn column_conserves_index_multiset() {
        let p = ModularParams::defaults(2).unwrap();
        let x = fused_column(&DynWeight::new(vec![0, 2]), C64::new(0.3, 0.1), &p).unwrap();
        for r in 0..x.side() {
            for c in 0..x.side() {
                let mut lo = crate::tensor::multi_index(2, 3, r);
                let mut up = crate::tensor::multi_index(2, 3, c);
                lo.sort();
                up.sort();
                if lo != up {
                    assert_eq!(x.at(r, c), C64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn finite_at_internal_degeneration_point() {
        let p = ModularParams::defaults(3).unwrap();
        // the second factor sits at z + w = -w
        let x = fused_column(&DynWeight::new(vec![1, 0, -1]), -p.w * 2.0, &p).unwrap();
        assert!(x.entries().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn antisymmetry_and_its_negative_control() {
        let p = ModularParams::defaults(2).unwrap();
        let wt = DynWeight::new(vec![2, 0]);
        let z = C64::new(-0.12, 0.07);
        assert!(check_column_antisymmetry(&wt, z, &p).unwrap().max_residual < 1e-9);
        let bad = fused_column_with(&FaceWeights::new(&p).unwrap(), &wt, z, Some(1)).unwrap();
        assert!(column_antisymmetry_residual(&bad) > 1e-4);
    }

    #[test]
    fn projected_scalar_is_diagonal_and_dresses_to_constant() {
        let p = ModularParams::defaults(2).unwrap();
        let z = C64::new(0.17, 0.05);
        let wt = DynWeight::new(vec![-1, 2]);
        let q = qdet_matrix(&wt, z, &p).unwrap();
        assert!(q[0][1].norm() < 1e-10 && q[1][0].norm() < 1e-10);
        let rho = dressed_ratios(&wt, z, &p).unwrap();
        let other = dressed_ratios(&DynWeight::new(vec![3, 0]), z, &p).unwrap();
        assert!((rho[0] - rho[1]).norm() < 1e-8 * rho[0].norm());
        assert!((rho[0] - other[0]).norm() < 1e-8 * rho[0].norm());
    }

    #[test]
    fn theta_determinant_ratio_is_constant() {
        let p = ModularParams::defaults(3).unwrap();
        let a = [C64::new(0.1, 0.02), C64::new(-0.23, 0.11), C64::new(0.31, -0.05)];
        let b = [C64::new(-0.4, 0.0), C64::new(0.05, -0.13), C64::new(0.2, 0.17)];
        let ra = theta_det_ratio(&a, &p).unwrap();
        let rb = theta_det_ratio(&b, &p).unwrap();
        assert!((ra - rb).norm() < 1e-8 * ra.norm());
        let special = specialized_points(&DynWeight::new(vec![1, -1, 0]), C64::new(0.13, 0.02), &p);
        let rs = theta_det_ratio(&special, &p).unwrap();
        assert!((ra - rs).norm() < 1e-8 * ra.norm());
    }

    #[test]
    fn coincident_points_are_rejected() {
        let p = ModularParams::defaults(2).unwrap();
        let z = C64::new(0.2, 0.1);
        assert!(matches!(theta_det_ratio(&[z, z], &p), Err(Error::Genericity(_))));
    }
}
