//! Permutation operators, the antisymmetrizer, and products of face R-matrices
//! acting on pairs of slots of `V^{⊗k}` with state-dependent weight shifts.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::face::{r_tensor, FaceModel, FaceWeights};
use crate::lattice::DynWeight;
use crate::tensor::{flat_index, multi_index, DenseTensor};
use crate::theta::{ModularParams, C64};

/// A bijection of `{0..k-1}`, stored as its image list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return Err(Error::Permutation(images));
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(k: usize) -> Self {
        Self { images: (0..k).collect() }
    }

    pub fn transposition(k: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<usize> = (0..k).collect();
        images.swap(a, b);
        Self { images }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// `(self ∘ other)(l) = self(other(l))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation { images: other.images.iter().map(|&l| self.images[l]).collect() }
    }

    /// `+1` for even, `-1` for odd permutations.
    pub fn sign(&self) -> f64 {
        let mut inversions = 0;
        for i in 0..self.images.len() {
            for j in i + 1..self.images.len() {
                if self.images[i] > self.images[j] {
                    inversions += 1;
                }
            }
        }
        if inversions % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// All permutations of `k` symbols in lexicographic order.
    pub fn all(k: usize) -> Vec<Permutation> {
        fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
            if prefix.len() == used.len() {
                out.push(Permutation { images: prefix.clone() });
                return;
            }
            for i in 0..used.len() {
                if !used[i] {
                    used[i] = true;
                    prefix.push(i);
                    rec(prefix, used, out);
                    prefix.pop();
                    used[i] = false;
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::with_capacity(k), &mut vec![false; k], &mut out);
        out
    }
}

pub fn factorial(k: usize) -> usize {
    (1..=k).product()
}

/// Maps `e_{i_0} ⊗ ... ⊗ e_{i_{k-1}}` to `e_{i_{p(0)}} ⊗ ... ⊗ e_{i_{p(k-1)}}`,
/// so that `P(p).then(P(q)) = P(p ∘ q)`.
pub fn permutation_operator(perm: &Permutation, n: usize) -> DenseTensor {
    let k = perm.len();
    let mut t = DenseTensor::zeros(n, k);
    for r in 0..t.side() {
        let lower = multi_index(n, k, r);
        let upper: Vec<usize> = (0..k).map(|l| lower[perm.apply(l)]).collect();
        t.set(&lower, &upper, C64::new(1.0, 0.0));
    }
    t
}

/// `(1/k!) Σ_p sign(p) P(p)` on `V^{⊗k}`.
pub fn antisymmetrizer(k: usize, n: usize) -> DenseTensor {
    let mut acc = DenseTensor::zeros(n, k);
    for p in Permutation::all(k) {
        acc = &acc + &permutation_operator(&p, n).scale(C64::new(p.sign(), 0.0));
    }
    acc.scale(C64::new(1.0 / factorial(k) as f64, 0.0))
}

/// Antisymmetrizer on the first `k` of `slots` factors, identity on the rest.
pub fn antisymmetrizer_on_leading(k: usize, slots: usize, n: usize) -> DenseTensor {
    antisymmetrizer(k, n).kron(&DenseTensor::identity(n, slots - k))
}

/// One R-matrix in a product, acting on slots `(first, second)` at spectral
/// argument `z`. Its weight is the base weight shifted by `e_h` for the current
/// index `h` of every slot listed in `shift_slots`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainFactor {
    pub first: usize,
    pub second: usize,
    pub z: C64,
    pub shift_slots: Vec<usize>,
}

/// Evaluate an ordered product of R-matrices on `V^{⊗slots}`. Factors act in
/// list order; each basis state is propagated separately so that the weight
/// of every factor is read off the state it acts on.
pub fn chain_operator(
    model: &dyn FaceModel,
    wt: &DynWeight,
    slots: usize,
    factors: &[ChainFactor],
) -> Result<DenseTensor> {
    let n = model.params().n;
    wt.check_rank(model.params())?;
    for f in factors {
        if f.first >= slots || f.second >= slots || f.first == f.second {
            return Err(Error::Index(format!("factor on slots ({}, {}) of {slots}", f.first, f.second)));
        }
    }
    let side = n.pow(slots as u32);
    let zero = C64::new(0.0, 0.0);
    let mut caches: Vec<HashMap<DynWeight, DenseTensor>> = vec![HashMap::new(); factors.len()];
    let mut out = vec![zero; side * side];
    for r in 0..side {
        let mut state = vec![zero; side];
        state[r] = C64::new(1.0, 0.0);
        for (f, cache) in factors.iter().zip(caches.iter_mut()) {
            let mut next = vec![zero; side];
            for (s, &amp) in state.iter().enumerate() {
                if amp == zero {
                    continue;
                }
                let mut idx = multi_index(n, slots, s);
                let shift: Vec<usize> = f.shift_slots.iter().map(|&l| idx[l]).collect();
                let local = wt.shifted_by(&shift);
                let rm = match cache.get(&local) {
                    Some(t) => t,
                    None => {
                        let t = r_tensor(model, &local, f.z)?;
                        cache.entry(local).or_insert(t)
                    }
                };
                let (i, j) = (idx[f.first], idx[f.second]);
                for ip in 0..n {
                    for jp in 0..n {
                        let v = rm.get(&[i, j], &[ip, jp]);
                        if v == zero {
                            continue;
                        }
                        idx[f.first] = ip;
                        idx[f.second] = jp;
                        next[flat_index(n, &idx)] += amp * v;
                    }
                }
            }
            state = next;
        }
        out[r * side..(r + 1) * side].copy_from_slice(&state);
    }
    Ok(DenseTensor::from_entries(n, slots, out))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CherednikVariant {
    /// Every factor at the same weight.
    Plain,
    /// The factor on `(p, q)` sees the weight shifted by the current indices
    /// of all slots outside `p..=q`.
    Shifted,
}

impl CherednikVariant {
    pub const ALL: [CherednikVariant; 2] = [CherednikVariant::Plain, CherednikVariant::Shifted];

    pub fn name(self) -> &'static str {
        match self {
            CherednikVariant::Plain => "plain",
            CherednikVariant::Shifted => "shifted",
        }
    }
}

/// Factors `R_{01}, R_{02}, ..., R_{0,n-1}, R_{12}, ...`, with `R_{pq}` at `-(q-p) w`.
pub fn cherednik_factors(params: &ModularParams, variant: CherednikVariant) -> Vec<ChainFactor> {
    let n = params.n;
    let mut out = Vec::new();
    for p in 0..n {
        for q in p + 1..n {
            out.push(ChainFactor {
                first: p,
                second: q,
                z: -params.w * (q - p) as f64,
                shift_slots: match variant {
                    CherednikVariant::Plain => Vec::new(),
                    CherednikVariant::Shifted => (0..n).filter(|&l| l < p || l > q).collect(),
                },
            });
        }
    }
    out
}

pub fn cherednik(wt: &DynWeight, params: &ModularParams, variant: CherednikVariant) -> Result<DenseTensor> {
    let model = FaceWeights::new(params)?;
    chain_operator(&model, wt, params.n, &cherednik_factors(params, variant))
}

/// `max |A P_- - A|` with `P_-` on all slots of `a`.
pub fn cherednik_residual(a: &DenseTensor) -> f64 {
    let proj = antisymmetrizer(a.slots(), a.n());
    (&a.then(&proj) - a).max_abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::face::build_r;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(vec![0, 0, 2]).is_err());
        assert!(Permutation::new(vec![0, 3]).is_err());
        assert!(Permutation::new(vec![2, 0, 1]).is_ok());
    }

    #[test]
    fn identity_and_involution() {
        let id = permutation_operator(&Permutation::identity(3), 2);
        assert_eq!(id, DenseTensor::identity(2, 3));
        let t = permutation_operator(&Permutation::transposition(3, 0, 2), 3);
        assert_eq!(t.then(&t), DenseTensor::identity(3, 3));
    }

    #[test]
    fn composition_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let perms = Permutation::all(3);
        for _ in 0..20 {
            let p = &perms[rng.random_range(0..perms.len())];
            let q = &perms[rng.random_range(0..perms.len())];
            let lhs = permutation_operator(p, 3).then(&permutation_operator(q, 3));
            assert_eq!(lhs, permutation_operator(&p.compose(q), 3));
        }
    }

    #[test]
    fn signs_and_count() {
        assert_eq!(Permutation::all(4).len(), 24);
        let total: f64 = Permutation::all(4).iter().map(|p| p.sign()).sum();
        assert_eq!(total, 0.0);
        assert_eq!(Permutation::transposition(4, 1, 3).sign(), -1.0);
    }

    #[test]
    fn two_slot_antisymmetrizer() {
        let want = (&DenseTensor::identity(3, 2)
            - &permutation_operator(&Permutation::transposition(2, 0, 1), 3))
            .scale(C64::new(0.5, 0.0));
        assert!(antisymmetrizer(2, 3).max_diff(&want) < 1e-15);
    }

    #[test]
    fn projector_properties() {
        for n in [2, 3, 4] {
            let p = antisymmetrizer(n, n);
            assert!(p.then(&p).max_diff(&p) < 1e-12);
            assert!((p.trace() - C64::new(1.0, 0.0)).norm() < 1e-12);
            for perm in Permutation::all(n).iter().take(7) {
                let lhs = permutation_operator(perm, n).then(&p);
                assert!(lhs.max_diff(&p.scale(C64::new(perm.sign(), 0.0))) < 1e-12);
            }
        }
    }

    #[test]
    fn chain_of_one_factor_is_the_r_matrix() {
        let p = ModularParams::defaults(3).unwrap();
        let wt = DynWeight::new(vec![1, 0, -2]);
        let z = C64::new(0.3, 0.1);
        let model = FaceWeights::new(&p).unwrap();
        let f = ChainFactor { first: 0, second: 1, z, shift_slots: vec![] };
        let chain = chain_operator(&model, &wt, 2, &[f]).unwrap();
        assert!(chain.max_diff(&build_r(&wt, z, &p).unwrap()) == 0.0);
    }

    #[test]
    fn rank_two_variants_coincide_and_factor_through_projector() {
        let p = ModularParams::defaults(2).unwrap();
        let wt = DynWeight::new(vec![2, -1]);
        let plain = cherednik(&wt, &p, CherednikVariant::Plain).unwrap();
        let shifted = cherednik(&wt, &p, CherednikVariant::Shifted).unwrap();
        assert_eq!(plain, shifted);
        assert!(plain.max_diff(&build_r(&wt, -p.w, &p).unwrap()) == 0.0);
        assert!(cherednik_residual(&plain) < 1e-10);
    }

    #[test]
    fn shifted_variant_factors_through_projector() {
        for wt in [vec![0, 1, -1], vec![1, -2, 0, 2]] {
            let p = ModularParams::defaults(wt.len()).unwrap();
            let a = cherednik(&DynWeight::new(wt), &p, CherednikVariant::Shifted).unwrap();
            assert!(cherednik_residual(&a) < 1e-10);
        }
    }
}
