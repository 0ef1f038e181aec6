//! Generators, words and algebra elements.
//!
//! A monomial `f(a, b) A^{u_1}_{l_1} ... A^{u_k}_{l_k}` keeps its coefficient on
//! the left. Moving a coefficient `g` to the left past a generator `A^u_l`
//! shifts it: `A^u_l g(a, b) = g(a + e_u, b + e_l) A^u_l`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::lattice_fn::{Env, LatticeFn, LatticePoint};
use crate::error::Result;
use crate::theta::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Generator {
    pub upper: usize,
    pub lower: usize,
}

impl Generator {
    pub fn new(upper: usize, lower: usize) -> Self {
        Self { upper, lower }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A^{}_{}", self.upper, self.lower)
    }
}

pub type Word = Vec<Generator>;

pub fn format_word(word: &[Generator]) -> String {
    if word.is_empty() {
        return "1".into();
    }
    word.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(" ")
}

/// Total translation `(Σ e_upper, Σ e_lower)` a word applies to coefficients.
pub fn word_shift(n: usize, word: &[Generator]) -> (Vec<i64>, Vec<i64>) {
    let mut da = vec![0; n];
    let mut db = vec![0; n];
    for g in word {
        da[g.upper] += 1;
        db[g.lower] += 1;
    }
    (da, db)
}

/// Finite sum of monomials; identical words are merged.
#[derive(Clone, Debug)]
pub struct AlgElem {
    n: usize,
    terms: BTreeMap<Word, LatticeFn>,
}

impl AlgElem {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, LatticeFn::one())
    }

    pub fn scalar(n: usize, f: LatticeFn) -> Self {
        Self::monomial(n, f, Vec::new())
    }

    pub fn generator(n: usize, upper: usize, lower: usize) -> Self {
        Self::monomial(n, LatticeFn::one(), vec![Generator::new(upper, lower)])
    }

    pub fn monomial(n: usize, coef: LatticeFn, word: Word) -> Self {
        let mut out = Self::zero(n);
        out.push(coef, word);
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &LatticeFn)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, word: &[Generator]) -> Option<&LatticeFn> {
        self.terms.get(word)
    }

    /// Add `coef * word`, merging with an existing monomial.
    pub fn push(&mut self, coef: LatticeFn, word: Word) {
        if coef.is_const_zero() {
            return;
        }
        match self.terms.get_mut(&word) {
            Some(f) => *f = f.add(&coef),
            None => {
                self.terms.insert(word, coef);
            }
        }
    }

    pub fn add(&self, other: &AlgElem) -> AlgElem {
        let mut out = self.clone();
        for (w, f) in &other.terms {
            out.push(f.clone(), w.clone());
        }
        out
    }

    pub fn sub(&self, other: &AlgElem) -> AlgElem {
        let mut out = self.clone();
        for (w, f) in &other.terms {
            out.push(f.neg(), w.clone());
        }
        out
    }

    /// Left multiplication by a coefficient function.
    pub fn scale(&self, f: &LatticeFn) -> AlgElem {
        let mut out = Self::zero(self.n);
        for (w, g) in &self.terms {
            out.push(f.mul(g), w.clone());
        }
        out
    }

    /// `(f, w1) (g, w2) = (f * g(shifted by w1), w1 w2)`, extended bilinearly.
    pub fn multiply(&self, other: &AlgElem) -> AlgElem {
        let mut out = Self::zero(self.n);
        for (w1, f) in &self.terms {
            let (da, db) = word_shift(self.n, w1);
            for (w2, g) in &other.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out.push(f.mul(&g.shifted(&da, &db)), w);
            }
        }
        out
    }

    /// Every coefficient evaluated at `pt`.
    pub fn eval_coefficients(&self, env: &Env, pt: &LatticePoint) -> Result<BTreeMap<Word, C64>> {
        self.terms.iter().map(|(w, f)| Ok((w.clone(), f.eval(env, pt)?))).collect()
    }

    /// Largest coefficient modulus at `pt`.
    pub fn max_coefficient(&self, env: &Env, pt: &LatticePoint) -> Result<f64> {
        let mut m = 0.0f64;
        for f in self.terms.values() {
            m = m.max(f.eval(env, pt)?.norm());
        }
        Ok(m)
    }
}

impl fmt::Display for AlgElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let words: Vec<String> = self.terms.keys().map(|w| format_word(w)).collect();
        write!(f, "[{}]", words.join(", "))
    }
}

/// Largest coefficient difference between two elements at `pt`.
pub fn max_coefficient_diff(x: &AlgElem, y: &AlgElem, env: &Env, pt: &LatticePoint) -> Result<f64> {
    let cx = x.eval_coefficients(env, pt)?;
    let cy = y.eval_coefficients(env, pt)?;
    let zero = C64::new(0.0, 0.0);
    let mut m = 0.0f64;
    for w in cx.keys().chain(cy.keys()) {
        let d = cx.get(w).copied().unwrap_or(zero) - cy.get(w).copied().unwrap_or(zero);
        m = m.max(d.norm());
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::super::lattice_fn::Affine;
    use super::*;
    use crate::lattice::DynWeight;
    use crate::theta::ModularParams;

    fn pt(a: &[i64], b: &[i64]) -> LatticePoint {
        LatticePoint::new(DynWeight::new(a.to_vec()), DynWeight::new(b.to_vec()))
    }

    #[test]
    fn coefficient_crosses_generator_with_shift() {
        let p = ModularParams::defaults(2).unwrap();
        let env = Env::new(&p, C64::new(0.1, 0.0));
        let g = LatticeFn::sigma(Affine::zero(2).a(0, 1).b(1, 2).w(1));
        let x = AlgElem::generator(2, 1, 0).multiply(&AlgElem::scalar(2, g.clone()));
        let q = pt(&[0, 1], &[-1, 0]);
        let got = x.coefficient(&[Generator::new(1, 0)]).unwrap().eval(&env, &q).unwrap();
        let want = g.eval(&env, &q.offset(&[0, 1], &[1, 0])).unwrap();
        assert!((got - want).norm() < 1e-15);
    }

    #[test]
    fn unit_is_two_sided() {
        let p = ModularParams::defaults(2).unwrap();
        let env = Env::new(&p, C64::new(0.1, 0.0));
        let g = LatticeFn::sigma(Affine::zero(2).b(0, 1).w(1));
        let x = AlgElem::monomial(2, g, vec![Generator::new(0, 1), Generator::new(1, 1)]);
        let q = pt(&[1, 0], &[0, 0]);
        for y in [AlgElem::one(2).multiply(&x), x.multiply(&AlgElem::one(2))] {
            assert!(max_coefficient_diff(&x, &y, &env, &q).unwrap() < 1e-15);
        }
    }

    #[test]
    fn like_words_merge_and_cancel() {
        let x = AlgElem::generator(2, 0, 1);
        let y = x.add(&x).sub(&x).sub(&x);
        let p = ModularParams::defaults(2).unwrap();
        let env = Env::new(&p, C64::new(0.0, 0.0));
        assert_eq!(y.len(), 1);
        assert!(y.max_coefficient(&env, &pt(&[0, 0], &[0, 0])).unwrap() < 1e-15);
    }
}
