//! Coefficient functions on pairs of dynamical weights `(a, b)`.
//!
//! A [`LatticeFn`] is an immutable expression tree of constants and odd-theta
//! values of affine forms in the components `a_i`, `b_i`, the parameters `w`,
//! `delta` and the spectral variable `z`. Lattice translations are exact: they
//! are carried as integer height offsets and applied at evaluation time.

use std::sync::Arc;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{a_components, DynWeight, GENERICITY_GUARD};
use crate::theta::{ModularParams, C64};

/// A pair of height vectors `(a, b)` at which coefficients are evaluated.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub ma: DynWeight,
    pub mb: DynWeight,
}

impl LatticePoint {
    pub fn new(ma: DynWeight, mb: DynWeight) -> Self {
        Self { ma, mb }
    }

    pub fn offset(&self, da: &[i64], db: &[i64]) -> Self {
        Self { ma: self.ma.offset(da), mb: self.mb.offset(db) }
    }
}

/// Evaluation context: parameters and the spectral variable.
#[derive(Clone, Copy, Debug)]
pub struct Env<'a> {
    pub params: &'a ModularParams,
    pub z: C64,
}

impl<'a> Env<'a> {
    pub fn new(params: &'a ModularParams, z: C64) -> Self {
        Self { params, z }
    }
}

fn rational_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `c0 + w_coef w + delta_coef delta + z_coef z + Σ a_coef_i a_i + Σ b_coef_i b_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Affine {
    pub c0: C64,
    pub w_coef: Rational64,
    pub delta_coef: Rational64,
    pub z_coef: Rational64,
    pub a_coef: Vec<Rational64>,
    pub b_coef: Vec<Rational64>,
}

impl Affine {
    pub fn zero(n: usize) -> Self {
        let r0 = Rational64::from_integer(0);
        Self {
            c0: C64::new(0.0, 0.0),
            w_coef: r0,
            delta_coef: r0,
            z_coef: r0,
            a_coef: vec![r0; n],
            b_coef: vec![r0; n],
        }
    }

    pub fn a(mut self, i: usize, c: i64) -> Self {
        self.a_coef[i] += c;
        self
    }

    pub fn b(mut self, i: usize, c: i64) -> Self {
        self.b_coef[i] += c;
        self
    }

    pub fn w(mut self, c: i64) -> Self {
        self.w_coef += c;
        self
    }

    pub fn delta(mut self, c: i64) -> Self {
        self.delta_coef += c;
        self
    }

    pub fn z(mut self, c: i64) -> Self {
        self.z_coef += c;
        self
    }

    pub fn constant(mut self, c: C64) -> Self {
        self.c0 += c;
        self
    }

    fn eval(&self, env: &Env, a: &[C64], b: &[C64]) -> C64 {
        let p = env.params;
        let mut v = self.c0
            + p.w * rational_to_f64(self.w_coef)
            + p.delta0 * rational_to_f64(self.delta_coef)
            + env.z * rational_to_f64(self.z_coef);
        for (c, x) in self.a_coef.iter().zip(a) {
            if *c.numer() != 0 {
                v += x * rational_to_f64(*c);
            }
        }
        for (c, x) in self.b_coef.iter().zip(b) {
            if *c.numer() != 0 {
                v += x * rational_to_f64(*c);
            }
        }
        v
    }
}

#[derive(Debug)]
enum Node {
    Const(C64),
    Sigma(Affine),
    Mul(Vec<LatticeFn>),
    Div(LatticeFn, LatticeFn),
    Add(Vec<LatticeFn>),
    Shift { da: Vec<i64>, db: Vec<i64>, inner: LatticeFn },
}

#[derive(Clone, Debug)]
pub struct LatticeFn(Arc<Node>);

impl LatticeFn {
    pub fn constant(c: C64) -> Self {
        Self(Arc::new(Node::Const(c)))
    }

    pub fn one() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    pub fn zero() -> Self {
        Self::constant(C64::new(0.0, 0.0))
    }

    pub fn sigma(form: Affine) -> Self {
        Self(Arc::new(Node::Sigma(form)))
    }

    fn as_const(&self) -> Option<C64> {
        match &*self.0 {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_const_zero(&self) -> bool {
        self.as_const() == Some(C64::new(0.0, 0.0))
    }

    pub fn mul(&self, other: &LatticeFn) -> LatticeFn {
        match (self.as_const(), other.as_const()) {
            (Some(x), Some(y)) => return Self::constant(x * y),
            (Some(x), _) if x == C64::new(1.0, 0.0) => return other.clone(),
            (_, Some(y)) if y == C64::new(1.0, 0.0) => return self.clone(),
            (Some(x), _) | (_, Some(x)) if x == C64::new(0.0, 0.0) => return Self::zero(),
            _ => {}
        }
        let mut factors = Vec::new();
        for f in [self, other] {
            match &*f.0 {
                Node::Mul(fs) => factors.extend(fs.iter().cloned()),
                _ => factors.push(f.clone()),
            }
        }
        Self(Arc::new(Node::Mul(factors)))
    }

    pub fn div(&self, other: &LatticeFn) -> LatticeFn {
        if let (Some(x), Some(y)) = (self.as_const(), other.as_const()) {
            return Self::constant(x / y);
        }
        if self.is_const_zero() {
            return Self::zero();
        }
        Self(Arc::new(Node::Div(self.clone(), other.clone())))
    }

    pub fn add(&self, other: &LatticeFn) -> LatticeFn {
        if self.is_const_zero() {
            return other.clone();
        }
        if other.is_const_zero() {
            return self.clone();
        }
        let mut terms = Vec::new();
        for f in [self, other] {
            match &*f.0 {
                Node::Add(ts) => terms.extend(ts.iter().cloned()),
                _ => terms.push(f.clone()),
            }
        }
        Self(Arc::new(Node::Add(terms)))
    }

    pub fn scale(&self, c: C64) -> LatticeFn {
        self.mul(&Self::constant(c))
    }

    pub fn neg(&self) -> LatticeFn {
        self.scale(C64::new(-1.0, 0.0))
    }

    pub fn sub(&self, other: &LatticeFn) -> LatticeFn {
        self.add(&other.neg())
    }

    pub fn product<I: IntoIterator<Item = LatticeFn>>(it: I) -> LatticeFn {
        it.into_iter().fold(Self::one(), |acc, f| acc.mul(&f))
    }

    /// `f(a + da, b + db)`.
    pub fn shifted(&self, da: &[i64], db: &[i64]) -> LatticeFn {
        if da.iter().chain(db).all(|&x| x == 0) {
            return self.clone();
        }
        match &*self.0 {
            Node::Const(_) => self.clone(),
            Node::Shift { da: da0, db: db0, inner } => {
                let da: Vec<i64> = da0.iter().zip(da).map(|(x, y)| x + y).collect();
                let db: Vec<i64> = db0.iter().zip(db).map(|(x, y)| x + y).collect();
                inner.shifted(&da, &db)
            }
            _ => Self(Arc::new(Node::Shift { da: da.to_vec(), db: db.to_vec(), inner: self.clone() })),
        }
    }

    /// `Π_{i<j} σ(a_i - a_j)`.
    pub fn delta_a(n: usize) -> LatticeFn {
        Self::product((0..n).flat_map(|i| (i + 1..n).map(move |j| Self::sigma(Affine::zero(n).a(i, 1).a(j, -1)))))
    }

    /// `Π_{i<j} σ(b_i - b_j)`.
    pub fn delta_b(n: usize) -> LatticeFn {
        Self::product((0..n).flat_map(|i| (i + 1..n).map(move |j| Self::sigma(Affine::zero(n).b(i, 1).b(j, -1)))))
    }

    pub fn eval(&self, env: &Env, pt: &LatticePoint) -> Result<C64> {
        let a = a_components(&pt.ma, env.params);
        let b = a_components(&pt.mb, env.params);
        self.eval_at(env, pt, &a, &b)
    }

    fn eval_at(&self, env: &Env, pt: &LatticePoint, a: &[C64], b: &[C64]) -> Result<C64> {
        match &*self.0 {
            Node::Const(c) => Ok(*c),
            Node::Sigma(form) => Ok(env.params.sigma(form.eval(env, a, b))),
            Node::Mul(fs) => {
                let mut acc = C64::new(1.0, 0.0);
                for f in fs {
                    acc *= f.eval_at(env, pt, a, b)?;
                }
                Ok(acc)
            }
            Node::Div(num, den) => {
                let d = den.eval_at(env, pt, a, b)?;
                if d.norm() < GENERICITY_GUARD {
                    return Err(Error::Genericity(format!(
                        "coefficient denominator {d:e} at a = {}, b = {}",
                        pt.ma, pt.mb
                    )));
                }
                Ok(num.eval_at(env, pt, a, b)? / d)
            }
            Node::Add(ts) => {
                let mut acc = C64::new(0.0, 0.0);
                for t in ts {
                    acc += t.eval_at(env, pt, a, b)?;
                }
                Ok(acc)
            }
            Node::Shift { da, db, inner } => inner.eval(env, &pt.offset(da, db)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::delta_product;

    fn pt(a: &[i64], b: &[i64]) -> LatticePoint {
        LatticePoint::new(DynWeight::new(a.to_vec()), DynWeight::new(b.to_vec()))
    }

    #[test]
    fn sigma_leaf_matches_direct_value() {
        let p = ModularParams::defaults(3).unwrap();
        let env = Env::new(&p, C64::new(0.2, 0.1));
        let q = pt(&[1, 0, -1], &[0, 2, 0]);
        let f = LatticeFn::sigma(Affine::zero(3).z(1).w(2).delta(1).b(1, 1).a(0, -1));
        let a = a_components(&q.ma, &p);
        let b = a_components(&q.mb, &p);
        let want = p.sigma(env.z + p.w * 2.0 + p.delta0 + b[1] - a[0]);
        assert!((f.eval(&env, &q).unwrap() - want).norm() < 1e-15);
    }

    #[test]
    fn shift_is_translation_of_the_point() {
        let p = ModularParams::defaults(2).unwrap();
        let env = Env::new(&p, C64::new(0.0, 0.0));
        let f = LatticeFn::sigma(Affine::zero(2).a(0, 1).b(1, -1).w(1));
        let g = f.shifted(&[1, 0], &[0, 1]).shifted(&[0, 2], &[1, 0]);
        let q = pt(&[0, 1], &[2, -1]);
        let want = f.eval(&env, &q.offset(&[1, 2], &[1, 1])).unwrap();
        assert!((g.eval(&env, &q).unwrap() - want).norm() < 1e-15);
    }

    #[test]
    fn vandermonde_matches_lattice_module() {
        let p = ModularParams::defaults(3).unwrap();
        let env = Env::new(&p, C64::new(0.0, 0.0));
        let q = pt(&[2, -1, 0], &[0, 0, 1]);
        let d = LatticeFn::delta_a(3).eval(&env, &q).unwrap();
        assert!((d - delta_product(&q.ma, &p).unwrap()).norm() < 1e-15);
        let db = LatticeFn::delta_b(3).eval(&env, &q).unwrap();
        assert!((db - delta_product(&q.mb, &p).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn arithmetic_and_guarded_division() {
        let p = ModularParams::defaults(2).unwrap();
        let env = Env::new(&p, C64::new(0.0, 0.0));
        let q = pt(&[0, 0], &[0, 0]);
        let s = LatticeFn::sigma(Affine::zero(2).w(1));
        let e = s.mul(&s).sub(&s.scale(C64::new(2.0, 0.0))).div(&s);
        let sw = p.sigma(p.w);
        assert!((e.eval(&env, &q).unwrap() - (sw - 2.0)).norm() < 1e-14);
        let zero_den = LatticeFn::one().div(&LatticeFn::sigma(Affine::zero(2)));
        assert!(matches!(zero_den.eval(&env, &q), Err(Error::Genericity(_))));
    }
}
