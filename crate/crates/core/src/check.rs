//! Residual bookkeeping shared by the identity checks.

use serde::{Deserialize, Serialize};

use crate::theta::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Worst residual observed by a check and the threshold it is judged against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub max_residual: f64,
    pub threshold: f64,
}

impl Residual {
    pub fn new(max_residual: f64, threshold: f64) -> Self {
        Self { max_residual, threshold }
    }

    /// NaN residuals never pass.
    pub fn passed(&self) -> bool {
        self.max_residual < self.threshold
    }

    /// Keep the larger residual; NaN wins so it cannot be hidden.
    pub fn absorb(&mut self, r: f64) {
        if r.is_nan() || r > self.max_residual {
            self.max_residual = r;
        }
    }
}

/// `max |l - r|` divided by the larger of the two sides' max moduli.
pub fn relative_residual(lhs: &[C64], rhs: &[C64]) -> f64 {
    let max = |v: &[C64]| v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let diff = lhs.iter().zip(rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let scale = max(lhs).max(max(rhs));
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// Largest of the values, propagating NaN.
pub fn worst<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = 0.0;
    for v in values {
        if v.is_nan() {
            return f64::NAN;
        }
        acc = f64::max(acc, v);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_residual_is_scale_free() {
        let a = [C64::new(1.0, 0.0), C64::new(0.0, 2.0)];
        let b = [C64::new(1.0, 0.0), C64::new(0.0, 2.2)];
        let r1 = relative_residual(&a, &b);
        let a2: Vec<C64> = a.iter().map(|x| x * 1e6).collect();
        let b2: Vec<C64> = b.iter().map(|x| x * 1e6).collect();
        assert!((r1 - relative_residual(&a2, &b2)).abs() < 1e-15);
        assert!((r1 - 0.2 / 2.2).abs() < 1e-12);
    }

    #[test]
    fn nan_is_never_a_pass() {
        let mut r = Residual::new(0.0, 1e-9);
        r.absorb(f64::NAN);
        r.absorb(1e-12);
        assert!(!r.passed());
        assert!(worst([1.0, f64::NAN, 0.5]).is_nan());
    }
}
