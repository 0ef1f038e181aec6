//! Dynamical height vectors and the quantities derived from them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::theta::{ModularParams, C64};

/// Below this modulus a theta value used as a denominator is treated as zero.
pub const GENERICITY_GUARD: f64 = 1e-6;

/// Integer heights `(m_0, ..., m_{n-1})` labelling a face-model state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DynWeight {
    m: Vec<i64>,
}

impl DynWeight {
    pub fn new(m: Vec<i64>) -> Self {
        Self { m }
    }

    pub fn zeros(n: usize) -> Self {
        Self { m: vec![0; n] }
    }

    pub fn n(&self) -> usize {
        self.m.len()
    }

    pub fn heights(&self) -> &[i64] {
        &self.m
    }

    /// `m + e_j`.
    pub fn shifted(&self, j: usize) -> Self {
        let mut m = self.m.clone();
        m[j] += 1;
        Self { m }
    }

    /// `m - e_j`.
    pub fn unshifted(&self, j: usize) -> Self {
        let mut m = self.m.clone();
        m[j] -= 1;
        Self { m }
    }

    /// `m + sum_k e_{idx_k}`.
    pub fn shifted_by(&self, idx: &[usize]) -> Self {
        let mut m = self.m.clone();
        for &k in idx {
            m[k] += 1;
        }
        Self { m }
    }

    /// `m + v` for an integer vector `v`.
    pub fn offset(&self, v: &[i64]) -> Self {
        Self { m: self.m.iter().zip(v).map(|(a, b)| a + b).collect() }
    }

    /// Index `h` with `other = self + e_h`, if there is one.
    pub fn unit_step_to(&self, other: &DynWeight) -> Option<usize> {
        let mut found = None;
        for (k, (a, b)) in self.m.iter().zip(&other.m).enumerate() {
            match b - a {
                0 => {}
                1 if found.is_none() => found = Some(k),
                _ => return None,
            }
        }
        found
    }

    pub(crate) fn check_rank(&self, params: &ModularParams) -> Result<()> {
        if self.m.len() != params.n {
            return Err(Error::Parameter(format!(
                "weight has {} heights, expected {}",
                self.m.len(),
                params.n
            )));
        }
        Ok(())
    }
}

impl fmt::Display for DynWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.m)
    }
}

/// `abar_i = m_i - (1/n) sum_l m_l + w_i`.
pub fn abar(wt: &DynWeight, params: &ModularParams) -> Vec<C64> {
    let n = wt.n() as f64;
    let mean = wt.m.iter().sum::<i64>() as f64 / n;
    wt.m.iter()
        .zip(&params.w_vec)
        .map(|(&m, &wi)| C64::new(m as f64 - mean, 0.0) + wi)
        .collect()
}

/// `a_i = w * abar_i`.
pub fn a_components(wt: &DynWeight, params: &ModularParams) -> Vec<C64> {
    abar(wt, params).into_iter().map(|x| params.w * x).collect()
}

/// `a_ij = a_i - a_j`.
pub fn a_diff(wt: &DynWeight, params: &ModularParams, i: usize, j: usize) -> C64 {
    let a = a_components(wt, params);
    a[i] - a[j]
}

/// Elliptic Vandermonde factor `prod_{i<j} sigma(w (abar_i - abar_j))`.
pub fn delta_product(wt: &DynWeight, params: &ModularParams) -> Result<C64> {
    wt.check_rank(params)?;
    let a = a_components(wt, params);
    let mut prod = C64::new(1.0, 0.0);
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let s = params.sigma(a[i] - a[j]);
            if s.norm() < GENERICITY_GUARD {
                return Err(Error::Genericity(format!(
                    "sigma(a_{i}{j}) = {s:e} at weight {wt}"
                )));
            }
            prod *= s;
        }
    }
    Ok(prod)
}

/// True when every `sigma(a_ij)`, `i != j`, clears the genericity guard.
pub fn is_generic(wt: &DynWeight, params: &ModularParams) -> bool {
    let a = a_components(wt, params);
    (0..a.len()).all(|i| (i + 1..a.len()).all(|j| params.sigma(a[i] - a[j]).norm() >= GENERICITY_GUARD))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params_with(n: usize, w: C64, w_vec: Vec<C64>) -> ModularParams {
        let mut p = ModularParams::defaults(n).unwrap();
        p.w = w;
        p.w_vec = w_vec;
        p
    }

    fn close(a: &[C64], b: &[C64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-14)
    }

    #[test]
    fn abar_examples() {
        let wv = vec![C64::new(0.1, 0.0), C64::new(0.3, 0.0)];
        let p = params_with(2, C64::new(0.2, 0.0), wv.clone());
        assert!(close(&abar(&DynWeight::new(vec![0, 0]), &p), &wv));
        assert!(close(&abar(&DynWeight::new(vec![1, 1]), &p), &wv));

        let p3 = params_with(
            3,
            C64::new(0.2, 0.0),
            vec![C64::new(0.1, 0.0), C64::new(0.25, 0.0), C64::new(0.4, 0.0)],
        );
        let got = abar(&DynWeight::new(vec![2, 0, 1]), &p3);
        let want = [C64::new(1.1, 0.0), C64::new(-0.75, 0.0), C64::new(0.4, 0.0)];
        assert!(close(&got, &want), "{got:?}");
        let drift: C64 = got.iter().zip(&p3.w_vec).map(|(a, w)| a - w).sum();
        assert!(drift.norm() < 1e-14);
    }

    #[test]
    fn a_component_examples() {
        let wv = vec![C64::new(0.1, 0.0), C64::new(0.3, 0.0)];
        let p = params_with(2, C64::new(0.2, 0.0), wv.clone());
        let a = a_components(&DynWeight::zeros(2), &p);
        assert!(close(&a, &[C64::new(0.02, 0.0), C64::new(0.06, 0.0)]));
        assert!((a_diff(&DynWeight::zeros(2), &p, 0, 1) - C64::new(-0.04, 0.0)).norm() < 1e-15);

        let zero_w = params_with(2, C64::new(0.0, 0.0), wv);
        assert!(a_components(&DynWeight::new(vec![3, -2]), &zero_w).iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn delta_single_factor_for_rank_two() {
        let p = ModularParams::defaults(2).unwrap();
        let wt = DynWeight::new(vec![2, -1]);
        let ab = abar(&wt, &p);
        let want = p.sigma(p.w * (ab[0] - ab[1]));
        assert!((delta_product(&wt, &p).unwrap() - want).norm() < 1e-15);
    }

    #[test]
    fn delta_translation_invariant() {
        let p = ModularParams::defaults(3).unwrap();
        let wt = DynWeight::new(vec![1, -2, 3]);
        let shifted = wt.offset(&[2, 2, 2]);
        let d0 = delta_product(&wt, &p).unwrap();
        let d1 = delta_product(&shifted, &p).unwrap();
        assert!((d0 - d1).norm() <= 1e-12 * d0.norm());
    }

    #[test]
    fn swapping_heights_with_equal_shifts_flips_factor() {
        let mut p = ModularParams::defaults(3).unwrap();
        p.w_vec[1] = p.w_vec[0];
        let wt = DynWeight::new(vec![2, -1, 0]);
        let swapped = DynWeight::new(vec![-1, 2, 0]);
        let f = |wt: &DynWeight| p.sigma(a_diff(wt, &p, 0, 1));
        assert!((f(&wt) + f(&swapped)).norm() < 1e-14);
    }

    #[test]
    fn degenerate_weight_is_rejected() {
        let mut p = ModularParams::defaults(2).unwrap();
        p.w_vec[1] = p.w_vec[0];
        assert!(matches!(delta_product(&DynWeight::zeros(2), &p), Err(Error::Genericity(_))));
        assert!(!is_generic(&DynWeight::zeros(2), &p));
    }

    #[test]
    fn shift_round_trip_and_unit_steps() {
        let wt = DynWeight::new(vec![0, 3, -1]);
        assert_eq!(wt.shifted(2).unshifted(2), wt);
        assert_eq!(wt.unit_step_to(&wt.shifted(1)), Some(1));
        assert_eq!(wt.unit_step_to(&wt), None);
        assert_eq!(wt.unit_step_to(&wt.shifted(0).shifted(1)), None);
    }
}
