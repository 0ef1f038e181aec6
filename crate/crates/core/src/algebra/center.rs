//! The determinant-type element of the coefficient algebra, its commutation
//! with the generators, and the dimension of the span of its coefficients.
//!
//! `C(z) = N(a) (Δ(a)/Δ(b)) (1/n!) Σ_μ sign(μ) Φ_μ(z) A^0_{μ_0} A^1_{μ_1} ... A^{n-1}_{μ_{n-1}}`
//! with `Φ_μ(z) = Π_k σ(z + k w + δ + b_{μ_k} - a_k)`. The normalisation
//! `N(a) = 1 / Π_k Π_{l≠k} σ(a^{(k)}_l - a^{(k)}_k)`, `a^{(k)} = a + e_0 + ... + e_{k-1}`,
//! undoes the bracket rescaling of the generators.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::coeffs::{outgoing_state, CoeffData, ProbeBrackets};
use super::elem::{AlgElem, Generator};
use super::lattice_fn::{Affine, Env, LatticeFn, LatticePoint};
use super::rewrite::{
    confluence_probe, exchange_coefficients, normal_form, rule_rhs, Eq24Reading, RuleInstance, RuleKind,
};
use crate::check::{relative_residual, worst, Verdict};
use crate::error::{Error, Result};
use crate::lattice::DynWeight;
use crate::ops::{factorial, Permutation};
use crate::qdet::QuantumOperator;
use crate::sampling::{random_weight, SampleStream};
use crate::theta::{ModularParams, C64};

/// Above this relative size a represented commutator counts as nonzero.
pub const WITNESS_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CenterForm {
    /// Δ-ratio dressing and the bracket normalisation.
    Normalized,
    /// Δ-ratio dressing only.
    Literal,
    /// Bracket normalisation only.
    Undressed,
}

impl CenterForm {
    pub fn name(self) -> &'static str {
        match self {
            CenterForm::Normalized => "normalized",
            CenterForm::Literal => "literal",
            CenterForm::Undressed => "undressed",
        }
    }
}

/// `Φ_μ(z)`.
pub fn phi(n: usize, mu: &Permutation) -> LatticeFn {
    LatticeFn::product(
        (0..n).map(|k| LatticeFn::sigma(Affine::zero(n).z(1).w(k as i64).delta(1).b(mu.apply(k), 1).a(k, -1))),
    )
}

/// `Π_k Π_{l≠k} σ(a^{(k)}_l - a^{(k)}_k)`.
pub fn bracket_normalization(n: usize) -> LatticeFn {
    let mut da = vec![0i64; n];
    let db = vec![0i64; n];
    let mut acc = LatticeFn::one();
    for k in 0..n {
        for l in (0..n).filter(|&l| l != k) {
            acc = acc.mul(&LatticeFn::sigma(Affine::zero(n).a(l, 1).a(k, -1)).shifted(&da, &db));
        }
        da[k] += 1;
    }
    acc
}

pub fn center_element(n: usize, form: CenterForm) -> AlgElem {
    let mut pre = LatticeFn::constant(C64::new(1.0 / factorial(n) as f64, 0.0));
    if form != CenterForm::Undressed {
        pre = pre.mul(&LatticeFn::delta_a(n).div(&LatticeFn::delta_b(n)));
    }
    if form != CenterForm::Literal {
        pre = pre.div(&bracket_normalization(n));
    }
    let mut out = AlgElem::zero(n);
    for mu in Permutation::all(n) {
        let coef = pre.mul(&phi(n, &mu)).scale(C64::new(mu.sign(), 0.0));
        out.push(coef, (0..n).map(|k| Generator::new(k, mu.apply(k))).collect());
    }
    out
}

/// `A^{upper}_{lower}` on the quantum space at weight `a`, from bracket data.
pub fn generator_operator(br: &dyn CoeffData, a: &DynWeight, g: Generator) -> Result<QuantumOperator> {
    let n = br.n();
    let mut delta = vec![0i64; n];
    delta[g.lower] += 1;
    delta[g.upper] -= 1;
    let mut op = QuantumOperator::zeros(n, delta);
    for h in 0..n {
        if let Some(hp) = outgoing_state(h, g.lower, g.upper) {
            op.set(h, hp, br.bracket(&LatticePoint::new(a.clone(), a.shifted(h)), g.upper, g.lower)?);
        }
    }
    Ok(op)
}

/// An element acting on the quantum space at weight `a`: each coefficient
/// becomes the diagonal `f(a, a + e_h)`, each generator its bracket operator at
/// the weight reached so far. Products act left to right.
pub fn represent(x: &AlgElem, a: &DynWeight, br: &dyn CoeffData, env: &Env) -> Result<QuantumOperator> {
    let n = x.n();
    let mut acc: Option<QuantumOperator> = None;
    for (word, f) in x.terms() {
        let diag = (0..n)
            .map(|h| f.eval(env, &LatticePoint::new(a.clone(), a.shifted(h))))
            .collect::<Result<Vec<_>>>()?;
        let mut op = QuantumOperator::diagonal(&diag);
        let mut wt = a.clone();
        for g in word {
            op = op.then(&generator_operator(br, &wt, *g)?);
            wt = wt.shifted(g.upper);
        }
        acc = Some(match acc {
            Some(s) => s.add(&op),
            None => op,
        });
    }
    Ok(acc.unwrap_or_else(|| QuantumOperator::zeros(n, vec![0; n])))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterReport {
    pub verdict: Verdict,
    pub form: CenterForm,
    pub reading: Eq24Reading,
    /// Largest commutator coefficient relative to the largest coefficient of the element.
    pub max_residual: f64,
    pub threshold: f64,
    pub samples: usize,
    /// Largest represented commutator relative to its terms, when a representation was supplied.
    pub witness_residual: Option<f64>,
    /// Why the verdict is inconclusive, or which generator failed.
    pub certificate: Option<String>,
    pub rules_applied: BTreeSet<RuleInstance>,
}

fn sample_point(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> LatticePoint {
    LatticePoint::new(random_weight(rng, n), random_weight(rng, n))
}

/// Normal-order `[C, A^{j'}_j]` for every generator and test the coefficients
/// at `samples` lattice points.
///
/// A nonzero normal form is only conclusive when the rewriting is confluent or
/// the commutator is visibly nonzero in the supplied representation.
#[allow(clippy::too_many_arguments)]
pub fn check_center_commutes(
    n: usize,
    form: CenterForm,
    reading: Eq24Reading,
    env: &Env,
    samples: usize,
    stream: &SampleStream,
    tol: f64,
    witness: Option<&ProbeBrackets>,
) -> Result<CenterReport> {
    let c = center_element(n, form);
    let gens: Vec<Generator> = (0..n).flat_map(|u| (0..n).map(move |l| Generator::new(u, l))).collect();
    let forms: Vec<_> = gens
        .par_iter()
        .map(|&g| {
            let x = AlgElem::generator(n, g.upper, g.lower);
            (g, normal_form(&c.multiply(&x).sub(&x.multiply(&c)), reading))
        })
        .collect();
    let mut rules = BTreeSet::new();
    for (_, nf) in &forms {
        rules.extend(nf.applied.iter().copied());
    }
    let mut report = CenterReport {
        verdict: Verdict::Pass,
        form,
        reading,
        max_residual: 0.0,
        threshold: tol,
        samples,
        witness_residual: None,
        certificate: None,
        rules_applied: rules,
    };
    if let Some((g, nf)) = forms.iter().find(|(_, nf)| nf.inconclusive()) {
        let s = &nf.stuck[0];
        report.verdict = Verdict::Inconclusive;
        report.certificate = Some(format!(
            "commutator with {g}: no rule for the pair {} {} in word {}",
            s.left, s.right, s.word
        ));
        return Ok(report);
    }

    let per_point = (0..samples as u64)
        .into_par_iter()
        .map(|s| {
            stream.try_generic(s, |rng| {
                let pt = sample_point(rng, n);
                let scale = c.max_coefficient(env, &pt)?;
                let mut worst_gen = (0.0f64, gens[0]);
                for (g, nf) in &forms {
                    let m = nf.elem.max_coefficient(env, &pt)? / scale;
                    if m.is_nan() || m > worst_gen.0 {
                        worst_gen = (m, *g);
                    }
                }
                Ok(worst_gen)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (max_res, worst_g) = per_point.iter().fold((0.0f64, gens[0]), |acc, x| if x.0 > acc.0 || x.0.is_nan() { *x } else { acc });
    report.max_residual = max_res;
    if max_res < tol {
        return Ok(report);
    }

    if let Some(br) = witness {
        let w = (0..samples.min(10) as u64)
            .map(|s| {
                stream.try_generic(1_000_000 + s, |rng| {
                    let a = random_weight(rng, n);
                    let mut m = 0.0f64;
                    for &g in &gens {
                        let x = AlgElem::generator(n, g.upper, g.lower);
                        let cx = represent(&c.multiply(&x), &a, br, env)?;
                        let xc = represent(&x.multiply(&c), &a, br, env)?;
                        m = worst([m, relative_residual(cx.entries(), xc.entries())]);
                    }
                    Ok(m)
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let w = worst(w);
        report.witness_residual = Some(w);
        if !(w < WITNESS_TOL) {
            report.verdict = Verdict::Fail;
            report.certificate = Some(format!(
                "commutator with {worst_g} is nonzero in the fundamental representation (relative size {w:.3e})"
            ));
            return Ok(report);
        }
    }

    let points: Vec<LatticePoint> = (0..2u64)
        .map(|s| stream.try_generic(2_000_000 + s, |rng| {
            let pt = sample_point(rng, n);
            exchange_coefficients(n, Generator::new(1, 0), Generator::new(0, 1)).0.eval(env, &pt)?;
            Ok(pt)
        }))
        .collect::<Result<_>>()?;
    let conf = confluence_probe(n, 3, reading, env, &points)?;
    if conf.confluent(tol) {
        report.verdict = Verdict::Fail;
        report.certificate = Some(format!("commutator with {worst_g} has a nonzero normal form"));
    } else {
        report.verdict = Verdict::Inconclusive;
        report.certificate = Some(format!(
            "commutator with {worst_g} has a nonzero normal form, but the rewriting is not confluent: \
             word {} reduces differently from the left and from the right (discrepancy {:.3e})",
            conf.worst_word.as_deref().unwrap_or("?"),
            conf.max_discrepancy
        ));
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleSoundness {
    pub instances: usize,
    /// Worst `lhs - rhs` of an applied rule in the representation, relative.
    pub representation_residual: f64,
    /// Worst failure of the forward-then-back identity of the two-term rule.
    pub involution_residual: f64,
}

/// Check every applied rule instance in a representation and, for two-term
/// rules, the swap involution of its coefficients.
pub fn rule_soundness(
    rules: &BTreeSet<RuleInstance>,
    br: &dyn CoeffData,
    env: &Env,
    samples: usize,
    stream: &SampleStream,
) -> Result<RuleSoundness> {
    let n = br.n();
    let mut rep_res = 0.0f64;
    let mut inv_res = 0.0f64;
    for (idx, inst) in rules.iter().enumerate() {
        let lhs = AlgElem::monomial(n, LatticeFn::one(), vec![inst.left, inst.right]);
        let rhs = rule_rhs(n, inst);
        for s in 0..samples as u64 {
            let (r, i) = stream.try_generic((idx as u64) << 20 | s, |rng| {
                let a = random_weight(rng, n);
                let l = represent(&lhs, &a, br, env)?;
                let r = represent(&rhs, &a, br, env)?;
                // structurally zero products are compared against the size of their factors
                let factors = generator_operator(br, &a, inst.left)?.max_abs()
                    * generator_operator(br, &a.shifted(inst.left.upper), inst.right)?.max_abs();
                let scale = l.max_abs().max(r.max_abs()).max(factors);
                let diff = l.entries().iter().zip(r.entries()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
                let rr = if scale == 0.0 { diff } else { diff / scale };
                let mut ii = 0.0f64;
                if inst.kind == RuleKind::TwoTerm {
                    let pt = sample_point(rng, n);
                    let (l, r) = (inst.left, inst.right);
                    let (a0, b0) = exchange_coefficients(n, l, r);
                    let (a1, b1) = exchange_coefficients(n, r, l);
                    let (a2, b2) = exchange_coefficients(n, Generator::new(r.upper, l.lower), Generator::new(l.upper, r.lower));
                    let e = |f: &LatticeFn| f.eval(env, &pt);
                    let (a0, b0, a1, b1, a2, b2) = (e(&a0)?, e(&b0)?, e(&a1)?, e(&b1)?, e(&a2)?, e(&b2)?);
                    ii = worst([(a0 * a1 + b0 * b2 - 1.0).norm(), (a0 * b1 + b0 * a2).norm()]);
                }
                Ok((rr, ii))
            })?;
            rep_res = worst([rep_res, r]);
            inv_res = worst([inv_res, i]);
        }
    }
    Ok(RuleSoundness { instances: rules.len(), representation_residual: rep_res, involution_residual: inv_res })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub rank: usize,
    pub singular_values: Vec<f64>,
}

/// Relative cutoff below which a singular value counts as zero.
pub const RANK_CUTOFF: f64 = 1e-8;

/// Numerical rank of the matrix with rows `(Φ_μ(z_s))_μ` at a fixed lattice point.
pub fn center_rank(z_samples: &[C64], params: &ModularParams, pt: &LatticePoint) -> Result<RankReport> {
    let n = params.n;
    if z_samples.is_empty() {
        return Err(Error::Parameter("no spectral samples".into()));
    }
    for (i, a) in z_samples.iter().enumerate() {
        if z_samples[..i].iter().any(|b| (a - b).norm() < 1e-12) {
            return Err(Error::Genericity(format!("spectral sample {a} is repeated")));
        }
    }
    let perms = Permutation::all(n);
    let phis: Vec<LatticeFn> = perms.iter().map(|mu| phi(n, mu)).collect();
    let mut m = DMatrix::<C64>::zeros(z_samples.len(), perms.len());
    for (s, &z) in z_samples.iter().enumerate() {
        let env = Env::new(params, z);
        for (k, f) in phis.iter().enumerate() {
            m[(s, k)] = f.eval(&env, pt)?;
        }
    }
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Err(Error::Genericity("all coefficient rows vanish".into()));
    }
    let rank = sv.iter().filter(|&&s| s > RANK_CUTOFF * top).count();
    Ok(RankReport { rank, singular_values: sv })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::coeffs::PROBE_POINTS;
    use crate::qdet::calibrate;

    fn pt(a: &[i64], b: &[i64]) -> LatticePoint {
        LatticePoint::new(DynWeight::new(a.to_vec()), DynWeight::new(b.to_vec()))
    }

    #[test]
    fn element_structure() {
        let c = center_element(3, CenterForm::Normalized);
        assert_eq!(c.len(), 6);
        for (w, _) in c.terms() {
            assert_eq!(w.iter().map(|g| g.upper).collect::<Vec<_>>(), vec![0, 1, 2]);
            let mut lows: Vec<usize> = w.iter().map(|g| g.lower).collect();
            lows.sort();
            assert_eq!(lows, vec![0, 1, 2]);
        }
    }

    #[test]
    fn identity_coefficient_by_hand() {
        let p = ModularParams::defaults(2).unwrap();
        let z = C64::new(0.19, 0.03);
        let env = Env::new(&p, z);
        let q = pt(&[1, -1], &[0, 2]);
        let c = center_element(2, CenterForm::Literal);
        let got = c.coefficient(&[Generator::new(0, 0), Generator::new(1, 1)]).unwrap().eval(&env, &q).unwrap();
        let a = crate::lattice::a_components(&q.ma, &p);
        let b = crate::lattice::a_components(&q.mb, &p);
        let phi = p.sigma(z + p.delta0 + b[0] - a[0]) * p.sigma(z + p.w + p.delta0 + b[1] - a[1]);
        let ratio = p.sigma(a[0] - a[1]) / p.sigma(b[0] - b[1]);
        assert!((got - 0.5 * phi * ratio).norm() < 1e-14);
    }

    #[test]
    fn rank_two_commutes_and_undressed_does_not() {
        let p = ModularParams::defaults(2).unwrap();
        let env = Env::new(&p, C64::new(0.19, 0.03));
        let stream = SampleStream::new(2, "center");
        let (rep, _) = calibrate(&p).unwrap();
        let br = ProbeBrackets { probe: &rep, z_ref: PROBE_POINTS[0] };
        let ok = check_center_commutes(2, CenterForm::Normalized, Eq24Reading::GenericPair, &env, 10, &stream, 1e-8, Some(&br))
            .unwrap();
        assert_eq!(ok.verdict, Verdict::Pass, "{ok:?}");
        let bad = check_center_commutes(2, CenterForm::Undressed, Eq24Reading::GenericPair, &env, 10, &stream, 1e-8, Some(&br))
            .unwrap();
        assert_eq!(bad.verdict, Verdict::Fail, "{bad:?}");
        let s = rule_soundness(&ok.rules_applied, &br, &env, 4, &stream).unwrap();
        assert!(s.representation_residual < 1e-9 && s.involution_residual < 1e-9, "{s:?}");
    }

    #[test]
    fn representation_of_center_is_scalar() {
        let p = ModularParams::defaults(3).unwrap();
        let env = Env::new(&p, C64::new(0.19, 0.03));
        let (rep, _) = calibrate(&p).unwrap();
        let br = ProbeBrackets { probe: &rep, z_ref: PROBE_POINTS[0] };
        let c = center_element(3, CenterForm::Normalized);
        let x = represent(&c, &DynWeight::new(vec![1, 0, -1]), &br, &env).unwrap();
        let y = represent(&c, &DynWeight::new(vec![-2, 2, 0]), &br, &env).unwrap();
        assert!(x.max_off_diagonal() < 1e-12 * x.max_abs());
        let d = x.diagonal_entries();
        let e = y.diagonal_entries();
        for v in d.iter().chain(&e) {
            assert!((v - d[0]).norm() < 1e-9 * d[0].norm());
        }
    }

    #[test]
    fn rank_counts() {
        let p = ModularParams::defaults(2).unwrap();
        let q = pt(&[1, 0], &[0, 2]);
        let zs: Vec<C64> = (0..10).map(|k| C64::new(0.07 * k as f64 - 0.3, 0.03 * k as f64 - 0.1)).collect();
        assert_eq!(center_rank(&zs, &p, &q).unwrap().rank, 2);
        assert_eq!(center_rank(&zs[..1], &p, &q).unwrap().rank, 1);
        assert!(center_rank(&[zs[0], zs[0]], &p, &q).is_err());
    }
}
