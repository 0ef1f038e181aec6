//! Normal ordering of generator words with the exchange relations.
//!
//! Normal order is ascending `(upper, lower)`. An out-of-order adjacent pair
//! `A^p_q A^r_s` is rewritten as follows:
//!
//! * `q = s`: pure swap;
//! * `p = r`: pure swap;
//! * otherwise
//!   `A^p_q A^r_s = α A^r_s A^p_q + β A^r_q A^p_s` with
//!   `α = σ(x) σ(y - w) / (σ(x + w) σ(y))`, `β = σ(w) σ(x + y) / (σ(x + w) σ(y))`,
//!   `x = a_r - a_p`, `y = b_s - b_q`, evaluated after moving across the prefix.
//!
//! Under the literal reading the two-term rule is only applied when neither
//! generator is diagonal; otherwise such a pair is left in place and flagged.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::elem::{format_word, word_shift, AlgElem, Generator, Word};
use super::lattice_fn::{Affine, Env, LatticeFn, LatticePoint};
use crate::error::Result;
use crate::theta::C64;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Eq24Reading {
    /// Two-term rule whenever the uppers differ and the lowers differ.
    #[default]
    GenericPair,
    /// Two-term rule only when additionally each generator has distinct indices.
    PaperLiteral,
}

impl Eq24Reading {
    pub fn name(self) -> &'static str {
        match self {
            Eq24Reading::GenericPair => "generic-pair",
            Eq24Reading::PaperLiteral => "paper-literal",
        }
    }
}

/// Which out-of-order pair is rewritten first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    SameLower,
    SameUpper,
    TwoTerm,
}

/// An applied rewrite of the pair `left right` (in that order).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RuleInstance {
    pub kind: RuleKind,
    pub left: Generator,
    pub right: Generator,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StuckPair {
    pub left: Generator,
    pub right: Generator,
    pub word: String,
}

#[derive(Clone, Debug)]
pub struct NormalForm {
    pub elem: AlgElem,
    pub stuck: Vec<StuckPair>,
    pub applied: BTreeSet<RuleInstance>,
}

impl NormalForm {
    pub fn inconclusive(&self) -> bool {
        !self.stuck.is_empty()
    }
}

/// Rule for the out-of-order pair `left right`, or `None` when the reading leaves it.
pub fn rule_for(left: Generator, right: Generator, reading: Eq24Reading) -> Option<RuleKind> {
    if left <= right {
        return None;
    }
    if left.lower == right.lower {
        return Some(RuleKind::SameLower);
    }
    if left.upper == right.upper {
        return Some(RuleKind::SameUpper);
    }
    match reading {
        Eq24Reading::GenericPair => Some(RuleKind::TwoTerm),
        Eq24Reading::PaperLiteral => {
            (left.upper != left.lower && right.upper != right.lower).then_some(RuleKind::TwoTerm)
        }
    }
}

/// `(α, β)` for `A^p_q A^r_s = α A^r_s A^p_q + β A^r_q A^p_s`, at the unshifted point.
pub fn exchange_coefficients(n: usize, left: Generator, right: Generator) -> (LatticeFn, LatticeFn) {
    let (p, q, r, s) = (left.upper, left.lower, right.upper, right.lower);
    let x = || Affine::zero(n).a(r, 1).a(p, -1);
    let y = || Affine::zero(n).b(s, 1).b(q, -1);
    let den = LatticeFn::sigma(x().w(1)).mul(&LatticeFn::sigma(y()));
    let mut xy = x();
    xy.b_coef = y().b_coef;
    let alpha = LatticeFn::sigma(x()).mul(&LatticeFn::sigma(y().w(-1))).div(&den);
    let beta = LatticeFn::sigma(Affine::zero(n).w(1)).mul(&LatticeFn::sigma(xy)).div(&den);
    (alpha, beta)
}

/// Right-hand side of a rule instance as an element.
pub fn rule_rhs(n: usize, inst: &RuleInstance) -> AlgElem {
    let (l, r) = (inst.left, inst.right);
    match inst.kind {
        RuleKind::SameLower | RuleKind::SameUpper => AlgElem::monomial(n, LatticeFn::one(), vec![r, l]),
        RuleKind::TwoTerm => {
            let (alpha, beta) = exchange_coefficients(n, l, r);
            let mut out = AlgElem::monomial(n, alpha, vec![r, l]);
            out.push(beta, vec![Generator::new(r.upper, l.lower), Generator::new(l.upper, r.lower)]);
            out
        }
    }
}

pub fn normal_form(x: &AlgElem, reading: Eq24Reading) -> NormalForm {
    normal_form_with(x, reading, Strategy::Leftmost)
}

pub fn normal_form_with(x: &AlgElem, reading: Eq24Reading, strategy: Strategy) -> NormalForm {
    let n = x.n();
    let mut todo: Vec<(LatticeFn, Word)> = x.terms().map(|(w, f)| (f.clone(), w.clone())).collect();
    let mut out = AlgElem::zero(n);
    let mut stuck = Vec::new();
    let mut applied = BTreeSet::new();
    while let Some((coef, word)) = todo.pop() {
        let mut positions: Vec<usize> = (0..word.len().saturating_sub(1)).collect();
        if strategy == Strategy::Rightmost {
            positions.reverse();
        }
        let mut target = None;
        let mut first_stuck = None;
        for k in positions {
            if word[k] <= word[k + 1] {
                continue;
            }
            match rule_for(word[k], word[k + 1], reading) {
                Some(kind) => {
                    target = Some((k, kind));
                    break;
                }
                None => {
                    first_stuck.get_or_insert(k);
                }
            }
        }
        let Some((k, kind)) = target else {
            if let Some(k) = first_stuck {
                stuck.push(StuckPair { left: word[k], right: word[k + 1], word: format_word(&word) });
            }
            out.push(coef, word);
            continue;
        };
        let (l, r) = (word[k], word[k + 1]);
        applied.insert(RuleInstance { kind, left: l, right: r });
        let splice = |mid: [Generator; 2]| -> Word {
            let mut w = word[..k].to_vec();
            w.extend_from_slice(&mid);
            w.extend_from_slice(&word[k + 2..]);
            w
        };
        match kind {
            RuleKind::SameLower | RuleKind::SameUpper => todo.push((coef, splice([r, l]))),
            RuleKind::TwoTerm => {
                let (da, db) = word_shift(n, &word[..k]);
                let (alpha, beta) = exchange_coefficients(n, l, r);
                todo.push((coef.mul(&alpha.shifted(&da, &db)), splice([r, l])));
                let swapped = [Generator::new(r.upper, l.lower), Generator::new(l.upper, r.lower)];
                todo.push((coef.mul(&beta.shifted(&da, &db)), splice(swapped)));
            }
        }
    }
    NormalForm { elem: out, stuck, applied }
}

pub fn is_normal(word: &[Generator]) -> bool {
    word.windows(2).all(|p| p[0] <= p[1])
}

/// Outcome of comparing the two rewriting strategies on every word of a length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfluenceReport {
    pub words_checked: usize,
    /// Largest coefficient discrepancy relative to the larger coefficient scale.
    pub max_discrepancy: f64,
    pub worst_word: Option<String>,
}

impl ConfluenceReport {
    pub fn confluent(&self, tol: f64) -> bool {
        self.max_discrepancy < tol
    }
}

fn all_words(n: usize, len: usize) -> Vec<Word> {
    let gens: Vec<Generator> = (0..n).flat_map(|u| (0..n).map(move |l| Generator::new(u, l))).collect();
    let mut words: Vec<Word> = vec![Vec::new()];
    for _ in 0..len {
        words = words
            .into_iter()
            .flat_map(|w| {
                gens.iter().map(move |g| {
                    let mut v = w.clone();
                    v.push(*g);
                    v
                })
            })
            .collect();
    }
    words
}

/// Rewrite every word of length `len` with both strategies and compare the
/// results at `points`.
pub fn confluence_probe(
    n: usize,
    len: usize,
    reading: Eq24Reading,
    env: &Env,
    points: &[LatticePoint],
) -> Result<ConfluenceReport> {
    let zero = C64::new(0.0, 0.0);
    let mut report = ConfluenceReport { words_checked: 0, max_discrepancy: 0.0, worst_word: None };
    for word in all_words(n, len) {
        let x = AlgElem::monomial(n, LatticeFn::one(), word.clone());
        let left = normal_form_with(&x, reading, Strategy::Leftmost).elem;
        let right = normal_form_with(&x, reading, Strategy::Rightmost).elem;
        report.words_checked += 1;
        for pt in points {
            let cl = left.eval_coefficients(env, pt)?;
            let cr = right.eval_coefficients(env, pt)?;
            let scale = cl.values().chain(cr.values()).map(|c| c.norm()).fold(1.0, f64::max);
            for w in cl.keys().chain(cr.keys()) {
                let d = (cl.get(w).copied().unwrap_or(zero) - cr.get(w).copied().unwrap_or(zero)).norm() / scale;
                if d > report.max_discrepancy {
                    report.max_discrepancy = d;
                    report.worst_word = Some(format_word(&word));
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::super::elem::max_coefficient_diff;
    use super::*;
    use crate::lattice::DynWeight;
    use crate::theta::ModularParams;

    fn g(u: usize, l: usize) -> Generator {
        Generator::new(u, l)
    }

    fn pt(a: &[i64], b: &[i64]) -> LatticePoint {
        LatticePoint::new(DynWeight::new(a.to_vec()), DynWeight::new(b.to_vec()))
    }

    #[test]
    fn same_lower_pair_swaps() {
        let x = AlgElem::monomial(2, LatticeFn::one(), vec![g(1, 0), g(0, 0)]);
        let nf = normal_form(&x, Eq24Reading::GenericPair);
        assert_eq!(nf.elem.len(), 1);
        assert!(nf.elem.coefficient(&[g(0, 0), g(1, 0)]).is_some());
    }

    #[test]
    fn two_term_rule_matches_hand_coefficients() {
        let p = ModularParams::defaults(2).unwrap();
        let env = Env::new(&p, C64::new(0.0, 0.0));
        let x = AlgElem::generator(2, 1, 1).multiply(&AlgElem::generator(2, 0, 0));
        let nf = normal_form(&x, Eq24Reading::GenericPair).elem;
        let q = pt(&[1, -1], &[0, 2]);
        let a = crate::lattice::a_components(&q.ma, &p);
        let b = crate::lattice::a_components(&q.mb, &p);
        let (x01, y01) = (a[0] - a[1], b[0] - b[1]);
        let s = |v| p.sigma(v);
        let den = s(x01 + p.w) * s(y01);
        let alpha = s(x01) * s(y01 - p.w) / den;
        let beta = s(p.w) * s(x01 + y01) / den;
        let got_a = nf.coefficient(&[g(0, 0), g(1, 1)]).unwrap().eval(&env, &q).unwrap();
        let got_b = nf.coefficient(&[g(0, 1), g(1, 0)]).unwrap().eval(&env, &q).unwrap();
        assert!((got_a - alpha).norm() < 1e-13);
        assert!((got_b - beta).norm() < 1e-13);
    }

    #[test]
    fn ordered_word_is_unchanged() {
        let x = AlgElem::monomial(3, LatticeFn::one(), vec![g(0, 2), g(1, 0), g(2, 1)]);
        let nf = normal_form(&x, Eq24Reading::GenericPair);
        assert!(nf.applied.is_empty());
        assert_eq!(nf.elem.len(), 1);
    }

    #[test]
    fn prefix_shift_reaches_the_coefficient() {
        let p = ModularParams::defaults(2).unwrap();
        let env = Env::new(&p, C64::new(0.0, 0.0));
        let x = AlgElem::monomial(2, LatticeFn::one(), vec![g(0, 1), g(1, 1), g(0, 0)]);
        let nf = normal_form(&x, Eq24Reading::GenericPair).elem;
        let (alpha, _) = exchange_coefficients(2, g(1, 1), g(0, 0));
        let q = pt(&[0, 0], &[1, 0]);
        let got = nf.coefficient(&[g(0, 0), g(0, 1), g(1, 1)]).unwrap().eval(&env, &q).unwrap();
        let want = alpha.eval(&env, &q.offset(&[1, 0], &[0, 1])).unwrap();
        assert!((got - want).norm() < 1e-14);
    }

    #[test]
    fn normal_form_is_idempotent() {
        let p = ModularParams::defaults(3).unwrap();
        let env = Env::new(&p, C64::new(0.0, 0.0));
        let x = AlgElem::monomial(3, LatticeFn::one(), vec![g(2, 1), g(1, 0), g(0, 2)]);
        let once = normal_form(&x, Eq24Reading::GenericPair).elem;
        let twice = normal_form(&once, Eq24Reading::GenericPair);
        assert!(twice.applied.is_empty());
        let q = pt(&[1, 0, -1], &[0, 1, 2]);
        assert!(max_coefficient_diff(&once, &twice.elem, &env, &q).unwrap() < 1e-14);
    }

    #[test]
    fn swap_involution() {
        let p = ModularParams::defaults(3).unwrap();
        let env = Env::new(&p, C64::new(0.0, 0.0));
        let q = pt(&[2, 0, -1], &[0, -2, 1]);
        for (l, r) in [(g(1, 1), g(0, 0)), (g(2, 0), g(1, 2)), (g(2, 1), g(0, 2))] {
            let (a, b) = exchange_coefficients(3, l, r);
            let (a1, b1) = exchange_coefficients(3, r, l);
            let rq = g(r.upper, l.lower);
            let ls = g(l.upper, r.lower);
            let (a2, b2) = exchange_coefficients(3, rq, ls);
            let e = |f: &LatticeFn| f.eval(&env, &q).unwrap();
            assert!((e(&a) * e(&a1) + e(&b) * e(&b2) - 1.0).norm() < 1e-12);
            assert!((e(&a) * e(&b1) + e(&b) * e(&a2)).norm() < 1e-12);
        }
    }

    #[test]
    fn literal_reading_leaves_diagonal_pairs() {
        let x = AlgElem::monomial(2, LatticeFn::one(), vec![g(1, 1), g(0, 0)]);
        let nf = normal_form(&x, Eq24Reading::PaperLiteral);
        assert!(nf.inconclusive());
        assert_eq!(nf.stuck[0].left, g(1, 1));
    }
}
