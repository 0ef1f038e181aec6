//! The fundamental evaluation representation on the quantum space `V_0`, its
//! dynamical Yang-Baxter relation, and the quantum determinant as an operator.
//!
//! An L-element `L(a|z)^j_i` (auxiliary indices: `i` incoming, `j` outgoing)
//! acts on `V_0` as an `n x n` matrix. The second dynamical weight `b` is never
//! passed explicitly: on the quantum basis state `e_h` it is `a + e_h`.
//!
//! How the face weights are attached to an L-element is fixed by a
//! [`Convention`]. There are eight candidates, and [`calibrate`] selects the
//! unique one for which the exchange relation holds.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::check::{relative_residual, worst, Residual};
use crate::error::{Error, Result};
use crate::face::{FaceModel, FaceWeights};
use crate::lattice::{delta_product, DynWeight};
use crate::ops::{factorial, Permutation};
use crate::sampling::{random_complex, random_weight, SampleStream};
use crate::theta::{ModularParams, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Operator on `V_0`, stored row-major as `[h_in * n + h_out]`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumOperator {
    n: usize,
    entries: Vec<C64>,
    /// Change of the quantum weight, `(outgoing) - (incoming)` per component.
    weight_delta: Vec<i64>,
}

impl QuantumOperator {
    pub fn zeros(n: usize, weight_delta: Vec<i64>) -> Self {
        Self { n, entries: vec![ZERO; n * n], weight_delta }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![C64::new(1.0, 0.0); n])
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let n = values.len();
        let mut op = Self::zeros(n, vec![0; n]);
        for (h, &v) in values.iter().enumerate() {
            op.entries[h * n + h] = v;
        }
        op
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn weight_delta(&self) -> &[i64] {
        &self.weight_delta
    }

    pub fn get(&self, h_in: usize, h_out: usize) -> C64 {
        self.entries[h_in * self.n + h_out]
    }

    pub(crate) fn set(&mut self, h_in: usize, h_out: usize, v: C64) {
        self.entries[h_in * self.n + h_out] = v;
    }

    /// `self` acts first, then `other`.
    pub fn then(&self, other: &QuantumOperator) -> QuantumOperator {
        let n = self.n;
        let delta = self.weight_delta.iter().zip(&other.weight_delta).map(|(a, b)| a + b).collect();
        let mut out = Self::zeros(n, delta);
        for r in 0..n {
            for k in 0..n {
                let x = self.get(r, k);
                if x == ZERO {
                    continue;
                }
                for c in 0..n {
                    out.entries[r * n + c] += x * other.get(k, c);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &QuantumOperator) -> QuantumOperator {
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a += b;
        }
        out
    }

    pub fn scale(&self, s: C64) -> QuantumOperator {
        let mut out = self.clone();
        out.entries.iter_mut().for_each(|x| *x *= s);
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.n;
        (0..n * n).filter(|k| k / n != k % n).map(|k| self.entries[k].norm()).fold(0.0, f64::max)
    }

    pub fn diagonal_entries(&self) -> Vec<C64> {
        (0..self.n).map(|h| self.get(h, h)).collect()
    }

    /// True when every nonzero entry moves the state by `weight_delta`.
    pub fn conserves_weight(&self) -> bool {
        let n = self.n;
        (0..n).all(|h| {
            (0..n).all(|hp| {
                if self.get(h, hp) == ZERO {
                    return true;
                }
                (0..n).all(|k| (hp == k) as i64 - (h == k) as i64 == self.weight_delta[k])
            })
        })
    }
}

/// `max |l - r| / max(max |l|, max |r|)`.
pub fn operator_residual(lhs: &QuantumOperator, rhs: &QuantumOperator) -> f64 {
    relative_residual(lhs.entries(), rhs.entries())
}

/// Which weight the face weight of an L-element is evaluated at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DynArgument {
    /// The weight `a` the element is labelled by.
    Source,
    /// `b = a + e_h`, read off the incoming quantum state.
    Target,
}

/// Where the auxiliary pair sits among the face-weight indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndexPlacement {
    /// `R^{j h'}_{i h}`.
    AuxFirst,
    /// `R^{h' j}_{h i}`.
    QuantumFirst,
}

/// How a written product `X Y` acts on the quantum space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProductOrder {
    LeftActsFirst,
    RightActsFirst,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Convention {
    pub argument: DynArgument,
    pub placement: IndexPlacement,
    pub order: ProductOrder,
}

impl Convention {
    pub fn all() -> Vec<Convention> {
        let mut out = Vec::with_capacity(8);
        for argument in [DynArgument::Source, DynArgument::Target] {
            for placement in [IndexPlacement::AuxFirst, IndexPlacement::QuantumFirst] {
                for order in [ProductOrder::LeftActsFirst, ProductOrder::RightActsFirst] {
                    out.push(Convention { argument, placement, order });
                }
            }
        }
        out
    }

    /// Operator of the written product `ops[0] ops[1] ...`.
    pub fn compose(&self, ops: &[QuantumOperator]) -> QuantumOperator {
        let (first, rest) = ops.split_first().expect("empty product");
        match self.order {
            ProductOrder::LeftActsFirst => rest.iter().fold(first.clone(), |acc, op| acc.then(op)),
            ProductOrder::RightActsFirst => rest.iter().fold(first.clone(), |acc, op| op.then(&acc)),
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arg = match self.argument {
            DynArgument::Source => "source",
            DynArgument::Target => "target",
        };
        let place = match self.placement {
            IndexPlacement::AuxFirst => "aux-first",
            IndexPlacement::QuantumFirst => "quantum-first",
        };
        let order = match self.order {
            ProductOrder::LeftActsFirst => "left-acts-first",
            ProductOrder::RightActsFirst => "right-acts-first",
        };
        write!(f, "argument={arg} placement={place} order={order}")
    }
}

/// A face model together with the convention that turns it into L-elements.
#[derive(Clone)]
pub struct Representation {
    model: Arc<dyn FaceModel>,
    convention: Convention,
}

impl fmt::Debug for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Representation").field("convention", &self.convention).finish()
    }
}

impl Representation {
    /// Representation under an explicitly chosen convention, without checking it.
    pub fn with_convention(model: Arc<dyn FaceModel>, convention: Convention) -> Self {
        Self { model, convention }
    }

    pub fn params(&self) -> &ModularParams {
        self.model.params()
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn model(&self) -> &dyn FaceModel {
        self.model.as_ref()
    }

    pub fn compose(&self, ops: &[QuantumOperator]) -> QuantumOperator {
        self.convention.compose(ops)
    }

    /// `L(a|z)^j_i`: incoming auxiliary index `i`, outgoing `j`.
    pub fn fundamental_l(&self, a: &DynWeight, z: C64, i: usize, j: usize) -> Result<QuantumOperator> {
        let p = self.params();
        let n = p.n;
        a.check_rank(p)?;
        if i >= n || j >= n {
            return Err(Error::Index(format!("auxiliary indices ({i}, {j}) out of range")));
        }
        let mut delta = vec![0i64; n];
        delta[i] += 1;
        delta[j] -= 1;
        let mut op = QuantumOperator::zeros(n, delta);
        let zz = z - p.z0;
        for h in 0..n {
            // conservation {j, h'} = {i, h} leaves at most one outgoing state
            let hp = if i == j {
                h
            } else if h == j {
                i
            } else {
                continue;
            };
            let x = match self.convention.argument {
                DynArgument::Source => a.clone(),
                DynArgument::Target => a.shifted(h),
            };
            let v = match self.convention.placement {
                IndexPlacement::AuxFirst => self.model.weight(&x, zz, (i, h), (j, hp))?,
                IndexPlacement::QuantumFirst => self.model.weight(&x, zz, (h, i), (hp, j))?,
            };
            op.set(h, hp, v);
        }
        Ok(op)
    }

    /// Diagonal operator `Δ(a) / Δ(a + e_h)` on state `e_h`.
    pub fn dressing(&self, a: &DynWeight) -> Result<QuantumOperator> {
        let p = self.params();
        let d = delta_product(a, p)?;
        let values = (0..p.n)
            .map(|h| Ok(d / delta_product(&a.shifted(h), p)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(QuantumOperator::diagonal(&values))
    }

    /// Antisymmetrized product
    /// `(1/n!) Σ_μ sign(μ) L(a|z)^0_{μ_0} L(a+e_0|z+w)^1_{μ_1} ... L(..|z+(n-1)w)^{n-1}_{μ_{n-1}}`.
    pub fn qdet_operator(&self, a: &DynWeight, z: C64) -> Result<QuantumOperator> {
        let p = self.params();
        let n = p.n;
        let mut acc = QuantumOperator::zeros(n, vec![0; n]);
        for mu in Permutation::all(n) {
            let mut factors = Vec::with_capacity(n);
            let mut wt = a.clone();
            for k in 0..n {
                factors.push(self.fundamental_l(&wt, z + p.w * k as f64, mu.apply(k), k)?);
                wt = wt.shifted(k);
            }
            acc = acc.add(&self.compose(&factors).scale(C64::new(mu.sign(), 0.0)));
        }
        Ok(acc.scale(C64::new(1.0 / factorial(n) as f64, 0.0)))
    }

    /// Dressed determinant `Δ(a)/Δ(b) I(a|z)`.
    pub fn dressed_qdet(&self, a: &DynWeight, z: C64) -> Result<QuantumOperator> {
        Ok(self.compose(&[self.dressing(a)?, self.qdet_operator(a, z)?]))
    }

    /// Both sides of the exchange relation for external auxiliary indices
    /// `(i, j)` incoming and `(i2, j2)` outgoing:
    ///
    /// `Σ R(b|z1-z2)^{i'j'}_{ij} L(a|z1)^{i2}_{i'} L(a+e_{i2}|z2)^{j2}_{j'}`
    /// `= Σ L(a|z2)^{j'}_j L(a+e_{j'}|z1)^{i'}_i R(a|z1-z2)^{i2 j2}_{i'j'}`.
    #[allow(clippy::too_many_arguments)]
    pub fn dybr_sides(
        &self,
        a: &DynWeight,
        z1: C64,
        z2: C64,
        i: usize,
        j: usize,
        i2: usize,
        j2: usize,
    ) -> Result<(QuantumOperator, QuantumOperator)> {
        let p = self.params();
        let n = p.n;
        let z12 = z1 - z2;
        let mut lhs: Option<QuantumOperator> = None;
        let mut rhs: Option<QuantumOperator> = None;
        let push = |slot: &mut Option<QuantumOperator>, op: QuantumOperator| {
            *slot = Some(match slot.take() {
                Some(acc) => acc.add(&op),
                None => op,
            });
        };
        for ip in 0..n {
            for jp in 0..n {
                // weight read off the state the dressing factor acts on
                let mut diag = Vec::with_capacity(n);
                for h in 0..n {
                    diag.push(self.model.weight(&a.shifted(h), z12, (i, j), (ip, jp))?);
                }
                let left = self.compose(&[
                    QuantumOperator::diagonal(&diag),
                    self.fundamental_l(a, z1, ip, i2)?,
                    self.fundamental_l(&a.shifted(i2), z2, jp, j2)?,
                ]);
                push(&mut lhs, left);

                let r = self.model.weight(a, z12, (ip, jp), (i2, j2))?;
                let right = self
                    .compose(&[self.fundamental_l(a, z2, j, jp)?, self.fundamental_l(&a.shifted(jp), z1, i, ip)?])
                    .scale(r);
                push(&mut rhs, right);
            }
        }
        Ok((lhs.expect("n >= 1"), rhs.expect("n >= 1")))
    }

    /// `D I(a|z) L(a|u)^{j2}_j` against `L(a|u)^{j2}_j D' I(a+e_{j2}|z)`, with
    /// the Δ-ratio dressings `D, D'` present iff `dressed`.
    #[allow(clippy::too_many_arguments)]
    pub fn centrality_sides(
        &self,
        a: &DynWeight,
        z: C64,
        u: C64,
        j: usize,
        j2: usize,
        dressed: bool,
    ) -> Result<(QuantumOperator, QuantumOperator)> {
        let l = self.fundamental_l(a, u, j, j2)?;
        let a2 = a.shifted(j2);
        let (before, after) = if dressed {
            (self.dressed_qdet(a, z)?, self.dressed_qdet(&a2, z)?)
        } else {
            (self.qdet_operator(a, z)?, self.qdet_operator(&a2, z)?)
        };
        Ok((self.compose(&[before, l.clone()]), self.compose(&[l, after])))
    }
}

/// Worst exchange-relation residual over all external indices at one point.
fn dybr_point_residual(rep: &Representation, a: &DynWeight, z1: C64, z2: C64) -> Result<[f64; 4]> {
    let n = rep.params().n;
    let mut fam = [0.0f64; 4];
    for i in 0..n {
        for j in 0..n {
            for i2 in 0..n {
                for j2 in 0..n {
                    let (l, r) = rep.dybr_sides(a, z1, z2, i, j, i2, j2)?;
                    let k = DybrFamily::of(i, j, i2, j2) as usize;
                    fam[k] = worst([fam[k], operator_residual(&l, &r)]);
                }
            }
        }
    }
    Ok(fam)
}

fn draw_dybr_point<R: rand::Rng>(rng: &mut R, n: usize) -> (DynWeight, C64, C64) {
    let a = random_weight(rng, n);
    let z1 = random_complex(rng, 0.5, 0.3);
    let z2 = random_complex(rng, 0.5, 0.3);
    (a, z1, z2)
}

/// The four component families of the exchange relation, by which auxiliary
/// pairs coincide.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DybrFamily {
    /// `i = j`, `i2 = j2`.
    BothEqual,
    /// `i = j`, `i2 != j2`.
    IncomingEqual,
    /// `i != j`, `i2 = j2`.
    OutgoingEqual,
    /// `i != j`, `i2 != j2`.
    BothDistinct,
}

impl DybrFamily {
    pub const ALL: [DybrFamily; 4] =
        [DybrFamily::BothEqual, DybrFamily::IncomingEqual, DybrFamily::OutgoingEqual, DybrFamily::BothDistinct];

    pub fn of(i: usize, j: usize, i2: usize, j2: usize) -> Self {
        match (i == j, i2 == j2) {
            (true, true) => DybrFamily::BothEqual,
            (true, false) => DybrFamily::IncomingEqual,
            (false, true) => DybrFamily::OutgoingEqual,
            (false, false) => DybrFamily::BothDistinct,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DybrFamily::BothEqual => "both-equal",
            DybrFamily::IncomingEqual => "incoming-equal",
            DybrFamily::OutgoingEqual => "outgoing-equal",
            DybrFamily::BothDistinct => "both-distinct",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub convention: Convention,
    /// Worst exchange-relation residual of every candidate, in [`Convention::all`] order.
    pub candidates: Vec<(Convention, f64)>,
    pub samples: usize,
}

/// Points per candidate used by calibration.
pub const CALIBRATION_SAMPLES: usize = 6;

/// Select the unique convention satisfying the exchange relation for `model`.
pub fn calibrate_with(model: Arc<dyn FaceModel>) -> Result<(Representation, Calibration)> {
    let p = model.params().clone();
    let stream = SampleStream::new(0, "calibration");
    let mut candidates = Vec::new();
    for conv in Convention::all() {
        let rep = Representation::with_convention(model.clone(), conv);
        let residuals = (0..CALIBRATION_SAMPLES as u64)
            .map(|s| {
                stream.try_generic(s, |rng| {
                    let (a, z1, z2) = draw_dybr_point(rng, p.n);
                    dybr_point_residual(&rep, &a, z1, z2)
                })
            })
            .collect::<Result<Vec<_>>>()?;
        candidates.push((conv, worst(residuals.iter().flatten().copied())));
    }
    let passing: Vec<Convention> =
        candidates.iter().filter(|(_, r)| *r < p.tol_residual).map(|(c, _)| *c).collect();
    match passing.as_slice() {
        [conv] => Ok((
            Representation::with_convention(model, *conv),
            Calibration { convention: *conv, candidates, samples: CALIBRATION_SAMPLES },
        )),
        [] => Err(Error::Calibration(format!(
            "no convention satisfies the exchange relation; best residual {:e}",
            candidates.iter().map(|c| c.1).fold(f64::INFINITY, f64::min)
        ))),
        many => Err(Error::Calibration(format!("{} conventions pass: {many:?}", many.len()))),
    }
}

pub fn calibrate(params: &ModularParams) -> Result<(Representation, Calibration)> {
    calibrate_with(Arc::new(FaceWeights::new(params)?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DybrReport {
    pub overall: Residual,
    pub families: Vec<(DybrFamily, Residual)>,
    pub samples: usize,
}

/// Exchange relation at `samples` random points, every external index tuple at each.
pub fn check_dybr(rep: &Representation, samples: usize, stream: &SampleStream) -> Result<DybrReport> {
    let p = rep.params();
    let per_point = (0..samples as u64)
        .into_par_iter()
        .map(|s| {
            stream.try_generic(s, |rng| {
                let (a, z1, z2) = draw_dybr_point(rng, p.n);
                dybr_point_residual(rep, &a, z1, z2)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let tol = p.tol_residual;
    let families = DybrFamily::ALL
        .iter()
        .map(|&f| (f, Residual::new(worst(per_point.iter().map(|r| r[f as usize])), tol)))
        .collect();
    Ok(DybrReport {
        overall: Residual::new(worst(per_point.iter().flatten().copied()), tol),
        families,
        samples,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentralityReport {
    pub dressed: Residual,
    /// Worst residual without the Δ-ratio dressing; large for a faithful check.
    pub undressed_max: f64,
    pub samples: usize,
}

pub fn check_centrality(
    rep: &Representation,
    samples: usize,
    stream: &SampleStream,
    tol: f64,
) -> Result<CentralityReport> {
    let n = rep.params().n;
    let per_point = (0..samples as u64)
        .into_par_iter()
        .map(|s| {
            stream.try_generic(s, |rng| {
                let a = random_weight(rng, n);
                let z = random_complex(rng, 0.5, 0.3);
                let u = random_complex(rng, 0.5, 0.3);
                let mut dressed = 0.0f64;
                let mut undressed = 0.0f64;
                for j in 0..n {
                    for j2 in 0..n {
                        let (l, r) = rep.centrality_sides(&a, z, u, j, j2, true)?;
                        dressed = worst([dressed, operator_residual(&l, &r)]);
                        let (l, r) = rep.centrality_sides(&a, z, u, j, j2, false)?;
                        undressed = worst([undressed, operator_residual(&l, &r)]);
                    }
                }
                Ok((dressed, undressed))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CentralityReport {
        dressed: Residual::new(worst(per_point.iter().map(|x| x.0)), tol),
        undressed_max: worst(per_point.iter().map(|x| x.1)),
        samples,
    })
}
