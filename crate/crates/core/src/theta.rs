//! Theta functions with rational characteristics and the global model parameters.
//!
//! `theta[a, b](z, tau) = sum_m exp(i pi (m+a)^2 tau + 2 i pi (m+a)(z+b))`, and the
//! odd theta `sigma(z) = theta[1/2, 1/2](z, tau)`.

use std::f64::consts::PI;

use num_complex::Complex;
use num_rational::Rational64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Smallest admissible `Im(tau)`.
pub const MIN_IM_TAU: f64 = 0.3;

/// Upper bound on summed index pairs before the series is declared divergent.
const MAX_PAIRS: usize = 100_000;

/// Rational characteristics `(a, b)` kept exact so that `1/2 - j/n` carries no
/// floating drift.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ThetaChar {
    pub a_char: Rational64,
    pub b_char: Rational64,
}

impl ThetaChar {
    pub fn new(a_char: Rational64, b_char: Rational64) -> Self {
        Self { a_char, b_char }
    }

    /// Characteristic `(1/2, 1/2)` of the odd theta function.
    pub fn odd() -> Self {
        Self::new(Rational64::new(1, 2), Rational64::new(1, 2))
    }
}

fn ratio_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `exp(2 pi i * a * p)` with the fractional part of `a * p` taken in exact arithmetic.
fn rational_phase(a: Rational64, p: i64) -> C64 {
    let prod = a * Rational64::from_integer(p);
    let frac = prod - prod.floor();
    C64::from_polar(1.0, 2.0 * PI * ratio_to_f64(frac))
}

/// Symmetric-pair summation of the theta series at an already reduced argument.
fn theta_series(a: f64, b: f64, z: C64, tau: C64, tol: f64) -> Option<C64> {
    let i_pi = C64::new(0.0, PI);
    let term = |m: i64| {
        let x = m as f64 + a;
        (i_pi * x * x * tau + 2.0 * i_pi * x * (z + b)).exp()
    };
    let mut sum = C64::new(0.0, 0.0);
    let mut quiet = 0;
    for k in 0..MAX_PAIRS as i64 {
        let pair = term(k) + term(-1 - k);
        let pair_mag = term(k).norm() + term(-1 - k).norm();
        sum += pair;
        if pair_mag < tol * (sum.norm() + f64::MIN_POSITIVE) {
            quiet += 1;
            if quiet == 2 {
                return Some(sum);
            }
        } else {
            quiet = 0;
        }
    }
    None
}

/// Evaluate `theta[a, b](z, tau)`.
///
/// The argument is first reduced into the fundamental parallelogram with the
/// quasi-periodicity phases
/// `theta(z + p + q tau) = e^{2 pi i a p} e^{-i pi q^2 tau - 2 pi i q (z + b)} theta(z)`,
/// then the series is summed outward in symmetric index pairs until two
/// consecutive pairs fall below `tol` relative to the partial sum.
pub fn theta_eval(ch: &ThetaChar, z: C64, tau: C64, tol: f64) -> Result<C64> {
    if !(tau.im > 0.0) {
        return Err(Error::Parameter(format!(
            "theta series needs Im(tau) > 0, got {}",
            tau.im
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("series tolerance must be positive, got {tol}")));
    }
    let a = ratio_to_f64(ch.a_char);
    let b = ratio_to_f64(ch.b_char);

    let q = (z.im / tau.im).round();
    let z1 = z - tau * q;
    let p = z1.re.round();
    let reduced = z1 - p;

    let core = theta_series(a, b, reduced, tau, tol).ok_or_else(|| {
        Error::Parameter(format!("theta series did not converge for tau = {tau}"))
    })?;

    let i_pi = C64::new(0.0, PI);
    let tau_phase = (-i_pi * q * q * tau - 2.0 * i_pi * q * (reduced + b)).exp();
    Ok(rational_phase(ch.a_char, p as i64) * tau_phase * core)
}

/// Global parameters shared by every construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModularParams {
    /// Rank `n` of `sl_n`; the local space `V` is `n`-dimensional.
    pub n: usize,
    pub tau: C64,
    /// Crossing parameter `w`.
    pub w: C64,
    /// Generic shifts `w_l`, one per height component.
    pub w_vec: Vec<C64>,
    /// Spectral shift of the coefficient algebra (the same `delta` is used in
    /// the quantum-determinant coefficients).
    pub delta0: C64,
    /// Spectral offset of the fundamental representation.
    pub z0: C64,
    /// Normalisation `F(z)`, taken constant.
    pub f_const: C64,
    pub tol_series: f64,
    pub tol_residual: f64,
}

impl ModularParams {
    /// Validated constructor. `delta0` defaults to `w/n - z0`, the value for which
    /// the fundamental representation has the factorised coefficient form.
    pub fn new(n: usize, tau: C64, w: C64, w_vec: Vec<C64>, z0: C64, delta0: Option<C64>) -> Result<Self> {
        let delta0 = delta0.unwrap_or(w / n as f64 - z0);
        let params = Self {
            n,
            tau,
            w,
            w_vec,
            delta0,
            z0,
            f_const: C64::new(1.0, 0.0),
            tol_series: 1e-17,
            tol_residual: 1e-9,
        };
        params.validate()?;
        Ok(params)
    }

    /// Fixed generic parameters used by examples, tests and the default run.
    pub fn defaults(n: usize) -> Result<Self> {
        let w_vec = (0..n)
            .map(|k| C64::new(0.11 + 0.37 * k as f64, 0.05 * k as f64))
            .collect();
        Self::new(
            n,
            C64::new(0.15, 0.95),
            C64::new(0.13, 0.02),
            w_vec,
            C64::new(0.07, 0.03),
            None,
        )
    }

    /// A random generic parameter draw (used for calibration stability).
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Result<Self> {
        let tau = C64::new(rng.random_range(-0.3..0.3), rng.random_range(0.8..1.2));
        let w = C64::new(rng.random_range(0.08..0.2), rng.random_range(-0.05..0.05));
        let w_vec = (0..n)
            .map(|k| {
                C64::new(
                    0.37 * k as f64 + rng.random_range(-0.05..0.05),
                    0.05 * k as f64 + rng.random_range(-0.02..0.02),
                )
            })
            .collect();
        let z0 = C64::new(rng.random_range(-0.1..0.1), rng.random_range(-0.05..0.05));
        Self::new(n, tau, w, w_vec, z0, None)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Parameter(format!("rank n must be at least 2, got {}", self.n)));
        }
        if !(self.tau.im >= MIN_IM_TAU) {
            return Err(Error::Parameter(format!(
                "Im(tau) = {} is below the convergence floor {MIN_IM_TAU}",
                self.tau.im
            )));
        }
        if self.w_vec.len() != self.n {
            return Err(Error::Parameter(format!(
                "w_vec has {} entries, expected {}",
                self.w_vec.len(),
                self.n
            )));
        }
        for i in 0..self.n {
            for j in i + 1..self.n {
                if lattice_distance(self.w_vec[i] - self.w_vec[j], self.tau) < 1e-9 {
                    return Err(Error::Parameter(format!(
                        "w_vec[{i}] and w_vec[{j}] coincide modulo the period lattice"
                    )));
                }
            }
        }
        if !(self.tol_series > 0.0) || !(self.tol_residual > 0.0) {
            return Err(Error::Parameter("tolerances must be positive".into()));
        }
        Ok(())
    }

    /// The odd theta function at this modulus.
    pub fn sigma(&self, z: C64) -> C64 {
        theta_eval(&ThetaChar::odd(), z, self.tau, self.tol_series)
            .expect("validated parameters always give a convergent series")
    }
}

/// Distance from `d` to the nearest point of `Z + tau Z`.
pub fn lattice_distance(d: C64, tau: C64) -> f64 {
    let q = (d.im / tau.im).round();
    let r = d - tau * q;
    let r = r - r.re.round();
    // neighbouring cells can be closer for skew tau
    let mut best = f64::INFINITY;
    for dq in -1..=1 {
        for dp in -1..=1 {
            best = best.min((r - tau * dq as f64 - dp as f64).norm());
        }
    }
    best
}

/// `sigma(z)` at modulus `tau` using the series tolerance of `params`.
pub fn sigma(z: C64, tau: C64, params: &ModularParams) -> Result<C64> {
    theta_eval(&ThetaChar::odd(), z, tau, params.tol_series)
}

/// Characteristic `(1/2 - j/n, 1/2)`; callers evaluate it at modulus `n tau`.
pub fn theta_slot(j: usize, params: &ModularParams) -> Result<ThetaChar> {
    if j >= params.n {
        return Err(Error::Index(format!("theta slot {j} out of range for n = {}", params.n)));
    }
    Ok(ThetaChar::new(
        Rational64::new(1, 2) - Rational64::new(j as i64, params.n as i64),
        Rational64::new(1, 2),
    ))
}
