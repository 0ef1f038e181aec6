//! Dense complex tensors on `V^{⊗k}` with `dim V = n`.
//!
//! Storage is row-major over the index list `(lower_1..lower_k, upper_1..upper_k)`.
//! Lower indices are incoming, upper indices outgoing, so as an operator the row
//! is the incoming multi-index and the column the outgoing one; `a.then(&b)` is
//! the operator "apply `a`, then `b`", i.e. the matrix product `a * b`.

use std::ops::{Add, Mul, Sub};

use crate::theta::C64;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor {
    n: usize,
    slots: usize,
    entries: Vec<C64>,
}

/// Flatten a multi-index in base `n`, first index most significant.
pub fn flat_index(n: usize, idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}

/// Inverse of [`flat_index`] for a multi-index of length `len`.
pub fn multi_index(n: usize, len: usize, mut flat: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for k in (0..len).rev() {
        out[k] = flat % n;
        flat /= n;
    }
    out
}

impl DenseTensor {
    pub fn zeros(n: usize, slots: usize) -> Self {
        let side = n.pow(slots as u32);
        Self { n, slots, entries: vec![C64::new(0.0, 0.0); side * side] }
    }

    pub fn identity(n: usize, slots: usize) -> Self {
        let mut t = Self::zeros(n, slots);
        let side = t.side();
        for r in 0..side {
            t.entries[r * side + r] = C64::new(1.0, 0.0);
        }
        t
    }

    /// Build entry by entry from `f(lower, upper)`.
    pub fn from_fn<F>(n: usize, slots: usize, mut f: F) -> Self
    where
        F: FnMut(&[usize], &[usize]) -> C64,
    {
        let mut t = Self::zeros(n, slots);
        let side = t.side();
        for r in 0..side {
            let lower = multi_index(n, slots, r);
            for c in 0..side {
                let upper = multi_index(n, slots, c);
                t.entries[r * side + c] = f(&lower, &upper);
            }
        }
        t
    }

    pub(crate) fn from_entries(n: usize, slots: usize, entries: Vec<C64>) -> Self {
        assert_eq!(entries.len(), n.pow(2 * slots as u32));
        Self { n, slots, entries }
    }

    /// Local dimension `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of tensor factors `k`.
    pub fn slots(&self) -> usize {
        self.slots
    }

    /// Index extents, lower indices first.
    pub fn dims(&self) -> Vec<usize> {
        vec![self.n; 2 * self.slots]
    }

    /// `n^k`, the side length of the operator matrix.
    pub fn side(&self) -> usize {
        self.n.pow(self.slots as u32)
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn get(&self, lower: &[usize], upper: &[usize]) -> C64 {
        self.entries[flat_index(self.n, lower) * self.side() + flat_index(self.n, upper)]
    }

    pub fn set(&mut self, lower: &[usize], upper: &[usize], value: C64) {
        let side = self.side();
        self.entries[flat_index(self.n, lower) * side + flat_index(self.n, upper)] = value;
    }

    pub(crate) fn at(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.side() + col]
    }

    /// Operator composition: `self` acts first, then `other`.
    pub fn then(&self, other: &DenseTensor) -> DenseTensor {
        assert_eq!((self.n, self.slots), (other.n, other.slots), "shape mismatch");
        let side = self.side();
        let mut out = vec![C64::new(0.0, 0.0); side * side];
        for r in 0..side {
            let row = &mut out[r * side..(r + 1) * side];
            for k in 0..side {
                let x = self.entries[r * side + k];
                if x.re == 0.0 && x.im == 0.0 {
                    continue;
                }
                let orow = &other.entries[k * side..(k + 1) * side];
                for (dst, &y) in row.iter_mut().zip(orow) {
                    *dst += x * y;
                }
            }
        }
        Self { n: self.n, slots: self.slots, entries: out }
    }

    /// Tensor product; the slots of `self` come first.
    pub fn kron(&self, other: &DenseTensor) -> DenseTensor {
        assert_eq!(self.n, other.n);
        let (sa, sb) = (self.side(), other.side());
        let side = sa * sb;
        let mut out = vec![C64::new(0.0, 0.0); side * side];
        for r1 in 0..sa {
            for c1 in 0..sa {
                let x = self.entries[r1 * sa + c1];
                if x.re == 0.0 && x.im == 0.0 {
                    continue;
                }
                for r2 in 0..sb {
                    for c2 in 0..sb {
                        out[(r1 * sb + r2) * side + c1 * sb + c2] = x * other.entries[r2 * sb + c2];
                    }
                }
            }
        }
        Self { n: self.n, slots: self.slots + other.slots, entries: out }
    }

    pub fn scale(&self, s: C64) -> DenseTensor {
        Self { n: self.n, slots: self.slots, entries: self.entries.iter().map(|x| x * s).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.side()).map(|r| self.at(r, r)).sum()
    }

    /// `max |self - other|`.
    pub fn max_diff(&self, other: &DenseTensor) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for &DenseTensor {
    type Output = DenseTensor;
    fn add(self, rhs: &DenseTensor) -> DenseTensor {
        assert_eq!((self.n, self.slots), (rhs.n, rhs.slots));
        DenseTensor {
            n: self.n,
            slots: self.slots,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &DenseTensor {
    type Output = DenseTensor;
    fn sub(self, rhs: &DenseTensor) -> DenseTensor {
        self + &rhs.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for &DenseTensor {
    type Output = DenseTensor;
    /// Matrix product, same as [`DenseTensor::then`].
    fn mul(self, rhs: &DenseTensor) -> DenseTensor {
        self.then(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pseudo_random(n: usize, slots: usize, salt: f64) -> DenseTensor {
        DenseTensor::from_fn(n, slots, |l, u| {
            let a = flat_index(n, l) as f64;
            let b = flat_index(n, u) as f64;
            C64::new((a * 1.3 + b * 0.7 + salt).sin(), (a * 0.4 - b * 1.1 + salt).cos())
        })
    }

    #[test]
    fn entry_count_matches_dims() {
        let t = DenseTensor::zeros(3, 2);
        assert_eq!(t.entries().len(), t.dims().iter().product::<usize>());
    }

    #[test]
    fn index_round_trip() {
        for f in 0..81 {
            assert_eq!(flat_index(3, &multi_index(3, 4, f)), f);
        }
    }

    #[test]
    fn composition_is_associative() {
        let a = pseudo_random(2, 2, 0.1);
        let b = pseudo_random(2, 2, 0.2);
        let c = pseudo_random(2, 2, 0.3);
        let left = a.then(&b).then(&c);
        let right = a.then(&b.then(&c));
        assert!(left.max_diff(&right) < 1e-12);
    }

    #[test]
    fn identity_is_neutral_and_kron_of_identities_is_identity() {
        let a = pseudo_random(3, 1, 0.5);
        let id = DenseTensor::identity(3, 1);
        assert!(a.then(&id).max_diff(&a) == 0.0);
        assert!(id.kron(&id).max_diff(&DenseTensor::identity(3, 2)) == 0.0);
    }

    #[test]
    fn kron_respects_slot_order() {
        let a = pseudo_random(2, 1, 0.9);
        let b = pseudo_random(2, 1, 1.7);
        let ab = a.kron(&b);
        for l in [[0, 1], [1, 0], [1, 1]] {
            for u in [[0, 0], [1, 0], [0, 1]] {
                let want = a.get(&l[..1], &u[..1]) * b.get(&l[1..], &u[1..]);
                assert!((ab.get(&l, &u) - want).norm() < 1e-15);
            }
        }
    }
}
