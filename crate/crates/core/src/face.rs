//! Face (IRF) Boltzmann weights of the `A_{n-1}` model written as an
//! `n^2 x n^2` R-matrix `R(a|z)^{i'j'}_{ij}`.

use crate::check::Residual;
use crate::error::{Error, Result};
use crate::lattice::{a_diff, DynWeight, GENERICITY_GUARD};
use crate::ops::{permutation_operator, Permutation};
use crate::tensor::DenseTensor;
use crate::theta::{ModularParams, C64};

/// Source of face weights. The standard weights are [`FaceWeights`]; wrappers
/// such as [`Perturbed`] exist for negative controls.
pub trait FaceModel: Send + Sync {
    fn params(&self) -> &ModularParams;

    /// `R(a|z)^{upper_1 upper_2}_{lower_1 lower_2}`.
    fn weight(&self, wt: &DynWeight, z: C64, lower: (usize, usize), upper: (usize, usize)) -> Result<C64>;
}

#[derive(Clone, Debug)]
pub struct FaceWeights {
    params: ModularParams,
    sigma_w: C64,
}

impl FaceWeights {
    pub fn new(params: &ModularParams) -> Result<Self> {
        let sigma_w = params.sigma(params.w);
        if sigma_w.norm() < GENERICITY_GUARD {
            return Err(Error::Genericity(format!("sigma(w) = {sigma_w:e}")));
        }
        Ok(Self { params: params.clone(), sigma_w })
    }
}

impl FaceModel for FaceWeights {
    fn params(&self) -> &ModularParams {
        &self.params
    }

    fn weight(&self, wt: &DynWeight, z: C64, lower: (usize, usize), upper: (usize, usize)) -> Result<C64> {
        let p = &self.params;
        let (i, j) = lower;
        if i == j {
            return Ok(if upper == (i, i) {
                p.sigma(z + p.w) / self.sigma_w
            } else {
                C64::new(0.0, 0.0)
            });
        }
        // structural zeros are never evaluated
        if upper != (i, j) && upper != (j, i) {
            return Ok(C64::new(0.0, 0.0));
        }
        let aij = a_diff(wt, p, i, j);
        let s_aij = p.sigma(aij);
        if s_aij.norm() < GENERICITY_GUARD {
            return Err(Error::Genericity(format!("sigma(a_{i}{j}) = {s_aij:e} at weight {wt}")));
        }
        Ok(if upper == (i, j) {
            p.sigma(z) * p.sigma(aij - p.w) / (self.sigma_w * s_aij)
        } else {
            p.sigma(z + aij) / s_aij
        })
    }
}

/// Adds `delta` to a single entry of an underlying face model.
#[derive(Clone, Debug)]
pub struct Perturbed<M> {
    pub inner: M,
    pub lower: (usize, usize),
    pub upper: (usize, usize),
    pub delta: C64,
}

impl<M: FaceModel> FaceModel for Perturbed<M> {
    fn params(&self) -> &ModularParams {
        self.inner.params()
    }

    fn weight(&self, wt: &DynWeight, z: C64, lower: (usize, usize), upper: (usize, usize)) -> Result<C64> {
        let v = self.inner.weight(wt, z, lower, upper)?;
        Ok(if lower == self.lower && upper == self.upper { v + self.delta } else { v })
    }
}

/// Assemble `R(a|z)` from a face model as a two-slot tensor.
pub fn r_tensor(model: &dyn FaceModel, wt: &DynWeight, z: C64) -> Result<DenseTensor> {
    let n = model.params().n;
    let mut t = DenseTensor::zeros(n, 2);
    for i in 0..n {
        for j in 0..n {
            for ip in 0..n {
                for jp in 0..n {
                    let v = model.weight(wt, z, (i, j), (ip, jp))?;
                    if v != C64::new(0.0, 0.0) {
                        t.set(&[i, j], &[ip, jp], v);
                    }
                }
            }
        }
    }
    Ok(t)
}

pub fn build_r(wt: &DynWeight, z: C64, params: &ModularParams) -> Result<DenseTensor> {
    wt.check_rank(params)?;
    r_tensor(&FaceWeights::new(params)?, wt, z)
}

/// `max |R + R P|` for a two-slot tensor; zero exactly when `R P = -R`.
pub fn degeneration_residual(r: &DenseTensor) -> f64 {
    let swap = permutation_operator(&Permutation::transposition(2, 0, 1), r.n());
    (r + &r.then(&swap)).max_abs()
}

/// At `z = -w` the R-matrix is annihilated by `Id + P`.
pub fn check_degeneration(wt: &DynWeight, params: &ModularParams) -> Result<Residual> {
    let r = build_r(wt, -params.w, params)?;
    Ok(Residual::new(degeneration_residual(&r), params.tol_residual))
}

/// Entries violating weight conservation (`{i',j'} != {i,j}` with a nonzero value).
pub fn ice_rule_violations(r: &DenseTensor) -> usize {
    let n = r.n();
    let mut bad = 0;
    for i in 0..n {
        for j in 0..n {
            for ip in 0..n {
                for jp in 0..n {
                    let conserved = (ip, jp) == (i, j) || (ip, jp) == (j, i);
                    if !conserved && r.get(&[i, j], &[ip, jp]) != C64::new(0.0, 0.0) {
                        bad += 1;
                    }
                }
            }
        }
    }
    bad
}
