//! Bracket coefficients of the generators, their quadratic relations, and
//! extraction of brackets from concrete L-operators.
//!
//! For an L-element of the factorised form
//! `L(a,b|z)^{i'}_i = F σ(z + δ + b_i - a_{i'}) (a,b)^{i'}_i`
//! the bracket is the rescaled coefficient
//! `[a,b]^{i'}_i = (a,b)^{i'}_i Π_{l≠i'} σ(a_l - a_{i'})`, and
//! `Y^{i'j'}_{ij} = [a,b]^{i'}_i [a+e_{i'}, b+e_i]^{j'}_j`.

use std::collections::{BTreeSet, HashMap};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::lattice_fn::{Env, LatticePoint};
use crate::check::{worst, Residual};
use crate::error::{Error, Result};
use crate::lattice::{a_components, DynWeight};
use crate::qdet::{QuantumOperator, Representation};
use crate::sampling::{random_weight, SampleStream};
use crate::theta::{ModularParams, C64};

use super::rewrite::Eq24Reading;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// A source of bracket values `[a,b]^{upper}_{lower}`.
pub trait CoeffData: Sync {
    fn n(&self) -> usize;

    fn bracket(&self, pt: &LatticePoint, upper: usize, lower: usize) -> Result<C64>;

    /// A lattice point at which this data can be evaluated, shifts included.
    fn draw_point(&self, rng: &mut ChaCha8Rng) -> LatticePoint {
        let n = self.n();
        LatticePoint::new(random_weight(rng, n), random_weight(rng, n))
    }
}

/// Every bracket equal to one.
#[derive(Clone, Copy, Debug)]
pub struct UnitBrackets {
    pub n: usize,
}

impl CoeffData for UnitBrackets {
    fn n(&self) -> usize {
        self.n
    }

    fn bracket(&self, _: &LatticePoint, _: usize, _: usize) -> Result<C64> {
        Ok(C64::new(1.0, 0.0))
    }
}

/// Multiplies one bracket label by a constant; a negative control.
pub struct ScaledBrackets<'a> {
    pub inner: &'a dyn CoeffData,
    pub upper: usize,
    pub lower: usize,
    pub factor: C64,
}

impl CoeffData for ScaledBrackets<'_> {
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn bracket(&self, pt: &LatticePoint, upper: usize, lower: usize) -> Result<C64> {
        let v = self.inner.bracket(pt, upper, lower)?;
        Ok(if (upper, lower) == (self.upper, self.lower) { v * self.factor } else { v })
    }

    fn draw_point(&self, rng: &mut ChaCha8Rng) -> LatticePoint {
        self.inner.draw_point(rng)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct TableEntry {
    upper: usize,
    lower: usize,
    lattice_point: LatticePoint,
    value: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct Table {
    n: usize,
    entries: Vec<TableEntry>,
}

/// Brackets read from a finite table.
#[derive(Clone, Debug, Default)]
pub struct TabulatedBrackets {
    n: usize,
    values: HashMap<(LatticePoint, usize, usize), C64>,
    /// Points at which every value needed by the quadratic relations is present.
    closed: Vec<LatticePoint>,
}

impl TabulatedBrackets {
    /// Record `source` at each point and at every once-shifted point.
    pub fn tabulate(source: &dyn CoeffData, points: &[LatticePoint]) -> Result<Self> {
        let n = source.n();
        let mut values = HashMap::new();
        for base in points {
            for (up, lo) in labels(n) {
                let shifted = base.offset(&unit(n, up), &unit(n, lo));
                for pt in [base, &shifted] {
                    for (u2, l2) in labels(n) {
                        let key = (pt.clone(), u2, l2);
                        if !values.contains_key(&key) {
                            values.insert(key, source.bracket(pt, u2, l2)?);
                        }
                    }
                }
            }
        }
        Ok(Self::from_values(n, values))
    }

    fn from_values(n: usize, values: HashMap<(LatticePoint, usize, usize), C64>) -> Self {
        let bases: BTreeSet<LatticePoint> = values.keys().map(|k| k.0.clone()).collect();
        let closed = bases
            .into_iter()
            .filter(|base| {
                labels(n).all(|(up, lo)| {
                    let shifted = base.offset(&unit(n, up), &unit(n, lo));
                    labels(n).all(|(u2, l2)| {
                        values.contains_key(&(base.clone(), u2, l2)) && values.contains_key(&(shifted.clone(), u2, l2))
                    })
                })
            })
            .collect();
        Self { n, values, closed }
    }

    pub fn closed_points(&self) -> &[LatticePoint] {
        &self.closed
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_json(&self) -> Result<String> {
        let mut entries: Vec<TableEntry> = self
            .values
            .iter()
            .map(|((pt, upper, lower), v)| TableEntry {
                upper: *upper,
                lower: *lower,
                lattice_point: pt.clone(),
                value: [v.re, v.im],
            })
            .collect();
        entries.sort_by(|x, y| (&x.lattice_point, x.upper, x.lower).cmp(&(&y.lattice_point, y.upper, y.lower)));
        Ok(serde_json::to_string_pretty(&Table { n: self.n, entries })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let table: Table = serde_json::from_str(text)?;
        let mut values = HashMap::new();
        for e in table.entries {
            if e.upper >= table.n || e.lower >= table.n {
                return Err(Error::Index(format!("bracket label ({}, {}) for n = {}", e.upper, e.lower, table.n)));
            }
            if e.lattice_point.ma.n() != table.n || e.lattice_point.mb.n() != table.n {
                return Err(Error::Parameter("lattice point length does not match n".into()));
            }
            values.insert((e.lattice_point, e.upper, e.lower), C64::new(e.value[0], e.value[1]));
        }
        Ok(Self::from_values(table.n, values))
    }
}

impl CoeffData for TabulatedBrackets {
    fn n(&self) -> usize {
        self.n
    }

    fn bracket(&self, pt: &LatticePoint, upper: usize, lower: usize) -> Result<C64> {
        self.values
            .get(&(pt.clone(), upper, lower))
            .copied()
            .ok_or_else(|| Error::Index(format!("no tabulated bracket ({upper}, {lower}) at a = {}, b = {}", pt.ma, pt.mb)))
    }

    fn draw_point(&self, rng: &mut ChaCha8Rng) -> LatticePoint {
        self.closed[rng.random_range(0..self.closed.len())].clone()
    }
}

fn labels(n: usize) -> impl Iterator<Item = (usize, usize)> + Clone {
    (0..n).flat_map(move |u| (0..n).map(move |l| (u, l)))
}

fn unit(n: usize, k: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[k] = 1;
    v
}

/// L-elements that can be probed at arbitrary spectral points.
pub trait LProbe: Sync {
    fn params(&self) -> &ModularParams;

    /// `L(a|z)^{upper}_{lower}` on the quantum space; `b = a + e_h` on state `e_h`.
    fn element(&self, a: &DynWeight, z: C64, lower: usize, upper: usize) -> Result<QuantumOperator>;
}

impl LProbe for Representation {
    fn params(&self) -> &ModularParams {
        Representation::params(self)
    }

    fn element(&self, a: &DynWeight, z: C64, lower: usize, upper: usize) -> Result<QuantumOperator> {
        self.fundamental_l(a, z, lower, upper)
    }
}

/// L-elements synthesised from pseudo-random coefficients and a chosen shift `delta`.
pub struct SyntheticProbe {
    params: ModularParams,
    delta: C64,
    stream: SampleStream,
}

impl SyntheticProbe {
    pub fn new(params: &ModularParams, delta: C64, seed: u64) -> Self {
        Self { params: params.clone(), delta, stream: SampleStream::new(seed, "synthetic-coefficients") }
    }

    /// The coefficient `(a,b)^{upper}_{lower}` the probe was built from.
    pub fn coefficient(&self, pt: &LatticePoint, upper: usize, lower: usize) -> C64 {
        let key: Vec<i64> = pt.ma.heights().iter().chain(pt.mb.heights()).copied().collect();
        let index = key.iter().fold((upper * self.params.n + lower) as u64, |acc, &m| {
            acc.wrapping_mul(31).wrapping_add((m + 1000) as u64)
        });
        let mut rng = self.stream.rng(index, 0);
        C64::new(rng.random_range(0.5..1.5), rng.random_range(-0.5..0.5))
    }
}

impl LProbe for SyntheticProbe {
    fn params(&self) -> &ModularParams {
        &self.params
    }

    fn element(&self, a: &DynWeight, z: C64, lower: usize, upper: usize) -> Result<QuantumOperator> {
        let n = self.params.n;
        let mut delta = vec![0i64; n];
        delta[lower] += 1;
        delta[upper] -= 1;
        let mut op = QuantumOperator::zeros(n, delta);
        for h in 0..n {
            let Some(hp) = outgoing_state(h, lower, upper) else { continue };
            let pt = LatticePoint::new(a.clone(), a.shifted(h));
            let ac = a_components(&pt.ma, &self.params);
            let bc = a_components(&pt.mb, &self.params);
            let v = self.params.f_const
                * self.params.sigma(z + self.delta + bc[lower] - ac[upper])
                * self.coefficient(&pt, upper, lower);
            op.set(h, hp, v);
        }
        Ok(op)
    }
}

/// Outgoing quantum state of `L^{upper}_{lower}` on `e_h`, if any.
pub fn outgoing_state(h: usize, lower: usize, upper: usize) -> Option<usize> {
    if lower == upper {
        Some(h)
    } else if h == upper {
        Some(lower)
    } else {
        None
    }
}

/// Brackets read off an L-probe at a reference spectral point.
pub struct ProbeBrackets<'a> {
    pub probe: &'a dyn LProbe,
    pub z_ref: C64,
}

impl ProbeBrackets<'_> {
    /// Unscaled coefficient `(a,b)^{upper}_{lower}`; zero when `b - a` is not a
    /// basis weight of the quantum space or the element does not connect it.
    pub fn raw(&self, pt: &LatticePoint, upper: usize, lower: usize) -> Result<C64> {
        raw_coefficient(self.probe, pt, self.z_ref, upper, lower)
    }
}

fn raw_coefficient(probe: &dyn LProbe, pt: &LatticePoint, z: C64, upper: usize, lower: usize) -> Result<C64> {
    let p = probe.params();
    let Some(h) = pt.ma.unit_step_to(&pt.mb) else { return Ok(ZERO) };
    let Some(hp) = outgoing_state(h, lower, upper) else { return Ok(ZERO) };
    let l = probe.element(&pt.ma, z, lower, upper)?;
    let ac = a_components(&pt.ma, p);
    let bc = a_components(&pt.mb, p);
    let s = p.sigma(z + p.delta0 + bc[lower] - ac[upper]);
    if s.norm() < crate::lattice::GENERICITY_GUARD {
        return Err(Error::Genericity(format!("probe point {z} hits a zero of the form factor")));
    }
    Ok(l.get(h, hp) / (s * p.f_const))
}

fn rescale(p: &ModularParams, pt: &LatticePoint, upper: usize, v: C64) -> C64 {
    let ac = a_components(&pt.ma, p);
    (0..p.n).filter(|&l| l != upper).fold(v, |acc, l| acc * p.sigma(ac[l] - ac[upper]))
}

impl CoeffData for ProbeBrackets<'_> {
    fn n(&self) -> usize {
        self.probe.params().n
    }

    fn bracket(&self, pt: &LatticePoint, upper: usize, lower: usize) -> Result<C64> {
        Ok(rescale(self.probe.params(), pt, upper, self.raw(pt, upper, lower)?))
    }

    fn draw_point(&self, rng: &mut ChaCha8Rng) -> LatticePoint {
        let n = self.n();
        let a = random_weight(rng, n);
        let h = rng.random_range(0..n);
        let b = a.shifted(h);
        LatticePoint::new(a, b)
    }
}

/// Conformance of an L-probe to the factorised form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    /// Worst relative spread of `L / σ(z + δ + b_i - a_{i'})` over the probe points.
    pub spread: f64,
    pub conforming: bool,
    pub entries_checked: usize,
}

/// Spectral points used to test z-independence.
pub const PROBE_POINTS: [C64; 5] = [
    C64 { re: 0.31, im: 0.02 },
    C64 { re: -0.17, im: 0.11 },
    C64 { re: 0.05, im: -0.23 },
    C64 { re: 0.42, im: 0.19 },
    C64 { re: -0.36, im: -0.08 },
];

/// Test the factorised form at `samples` random weights, every label and state.
pub fn extract_coefficients<'a>(
    probe: &'a dyn LProbe,
    samples: usize,
    stream: &SampleStream,
    tol: f64,
) -> Result<(ProbeBrackets<'a>, Extraction)> {
    let n = probe.params().n;
    let mut spread = 0.0f64;
    let mut checked = 0;
    for s in 0..samples as u64 {
        let (sp, count) = stream.try_generic(s, |rng| {
            let a = random_weight(rng, n);
            let mut sp = 0.0f64;
            let mut count = 0;
            for h in 0..n {
                let pt = LatticePoint::new(a.clone(), a.shifted(h));
                for (upper, lower) in labels(n) {
                    if outgoing_state(h, lower, upper).is_none() {
                        continue;
                    }
                    let vals = PROBE_POINTS
                        .iter()
                        .map(|&z| raw_coefficient(probe, &pt, z, upper, lower))
                        .collect::<Result<Vec<_>>>()?;
                    let r0 = vals[0];
                    let rel = worst(vals.iter().map(|v| (v - r0).norm() / r0.norm().max(f64::MIN_POSITIVE)));
                    sp = worst([sp, rel]);
                    count += 1;
                }
            }
            Ok((sp, count))
        })?;
        spread = worst([spread, sp]);
        checked += count;
    }
    Ok((
        ProbeBrackets { probe, z_ref: PROBE_POINTS[0] },
        Extraction { spread, conforming: spread < tol, entries_checked: checked },
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YReport {
    /// Equal lowers, distinct uppers.
    pub same_lower: Residual,
    /// Equal uppers, distinct lowers.
    pub same_upper: Residual,
    /// The three-term relation.
    pub three_term: Residual,
    pub reading: Eq24Reading,
    pub samples: usize,
}

fn y_value(c: &dyn CoeffData, pt: &LatticePoint, ip: usize, jp: usize, i: usize, j: usize) -> Result<C64> {
    let n = c.n();
    let first = c.bracket(pt, ip, i)?;
    if first == ZERO {
        return Ok(ZERO);
    }
    Ok(first * c.bracket(&pt.offset(&unit(n, ip), &unit(n, i)), jp, j)?)
}

/// Check the three families of quadratic relations on `Y` at `samples` points.
pub fn check_y_relations(
    coeff: &dyn CoeffData,
    params: &ModularParams,
    samples: usize,
    stream: &SampleStream,
    reading: Eq24Reading,
) -> Result<YReport> {
    let n = coeff.n();
    let env = Env::new(params, ZERO);
    let (mut r22, mut r23, mut r24) = (0.0f64, 0.0f64, 0.0f64);
    for s in 0..samples as u64 {
        // per family: (largest defect, largest term) at this point
        let fam = stream.try_generic(s, |rng| {
            let pt = coeff.draw_point(rng);
            let a = a_components(&pt.ma, env.params);
            let b = a_components(&pt.mb, env.params);
            let sg = |v: C64| env.params.sigma(v);
            let w = env.params.w;
            let mut fam = [(0.0f64, 0.0f64); 3];
            let mut absorb = |k: usize, terms: &[C64]| {
                let d = terms.iter().sum::<C64>().norm();
                let m = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
                fam[k] = (worst([fam[k].0, d]), fam[k].1.max(m));
            };
            for ip in 0..n {
                for jp in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            if ip != jp && i == j {
                                absorb(0, &[y_value(coeff, &pt, ip, jp, i, i)?, -y_value(coeff, &pt, jp, ip, i, i)?]);
                            }
                            if ip == jp && i != j {
                                absorb(1, &[y_value(coeff, &pt, ip, ip, i, j)?, -y_value(coeff, &pt, ip, ip, j, i)?]);
                            }
                            let applies = match reading {
                                Eq24Reading::GenericPair => ip != jp && i != j,
                                Eq24Reading::PaperLiteral => ip != i && jp != j,
                            };
                            if applies {
                                let (x, y) = (a[ip] - a[jp], b[i] - b[j]);
                                absorb(2, &[
                                    sg(w) * sg(x + y) * y_value(coeff, &pt, ip, jp, j, i)?,
                                    sg(x) * sg(y - w) * y_value(coeff, &pt, ip, jp, i, j)?,
                                    -sg(x + w) * sg(y) * y_value(coeff, &pt, jp, ip, j, i)?,
                                ]);
                            }
                        }
                    }
                }
            }
            Ok(fam)
        })?;
        let rel = |(d, m): (f64, f64)| if m == 0.0 { d } else { d / m };
        r22 = worst([r22, rel(fam[0])]);
        r23 = worst([r23, rel(fam[1])]);
        r24 = worst([r24, rel(fam[2])]);
    }
    let tol = params.tol_residual;
    Ok(YReport {
        same_lower: Residual::new(r22, tol),
        same_upper: Residual::new(r23, tol),
        three_term: Residual::new(r24, tol),
        reading,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qdet::calibrate;

    #[test]
    fn synthetic_round_trip_and_delta_sweep() {
        let p = ModularParams::defaults(2).unwrap();
        let stream = SampleStream::new(3, "extract");
        let probe = SyntheticProbe::new(&p, p.delta0, 9);
        let (br, ex) = extract_coefficients(&probe, 5, &stream, 1e-9).unwrap();
        assert!(ex.conforming, "{ex:?}");
        let pt = LatticePoint::new(DynWeight::new(vec![1, 0]), DynWeight::new(vec![1, 1]));
        let got = br.raw(&pt, 1, 0).unwrap();
        assert!((got - probe.coefficient(&pt, 1, 0)).norm() < 1e-11);

        let off = SyntheticProbe::new(&p, p.delta0 + 0.3, 9);
        let (_, ex) = extract_coefficients(&off, 5, &stream, 1e-9).unwrap();
        assert!(!ex.conforming);
    }

    #[test]
    fn fundamental_brackets_satisfy_relations() {
        for n in [2, 3] {
            let p = ModularParams::defaults(n).unwrap();
            let (rep, _) = calibrate(&p).unwrap();
            let stream = SampleStream::new(4, "y");
            let (br, ex) = extract_coefficients(&rep, 4, &stream, 1e-9).unwrap();
            assert!(ex.conforming, "{ex:?}");
            let y = check_y_relations(&br, &p, 10, &stream, Eq24Reading::GenericPair).unwrap();
            assert!(y.same_lower.passed() && y.same_upper.passed() && y.three_term.passed(), "{y:?}");

            let bad = ScaledBrackets { inner: &br, upper: 0, lower: 1, factor: C64::new(2.0, 0.0) };
            let y = check_y_relations(&bad, &p, 10, &stream, Eq24Reading::GenericPair).unwrap();
            assert!(y.three_term.max_residual > 1e-4);
        }
    }

    #[test]
    fn table_json_round_trip() {
        let p = ModularParams::defaults(2).unwrap();
        let (rep, _) = calibrate(&p).unwrap();
        let br = ProbeBrackets { probe: &rep, z_ref: PROBE_POINTS[0] };
        let a = DynWeight::new(vec![0, 1]);
        let points = vec![LatticePoint::new(a.clone(), a.shifted(0)), LatticePoint::new(a.clone(), a.shifted(1))];
        let table = TabulatedBrackets::tabulate(&br, &points).unwrap();
        let back = TabulatedBrackets::from_json(&table.to_json().unwrap()).unwrap();
        assert_eq!(back.closed_points().len(), 2);
        for pt in &points {
            for (u, l) in labels(2) {
                assert_eq!(back.bracket(pt, u, l).unwrap(), br.bracket(pt, u, l).unwrap());
            }
        }
        let stream = SampleStream::new(1, "table");
        let y = check_y_relations(&back, &p, 4, &stream, Eq24Reading::GenericPair).unwrap();
        assert!(y.three_term.passed());
    }
}
