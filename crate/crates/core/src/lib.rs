//! Numerical construction of the elliptic quantum group `E(tau,eta)(sl_n)` in its
//! face-model (IRF) realization.
//!
//! The crate builds the `A_{n-1}` face R-matrix from odd Jacobi theta functions,
//! the antisymmetric fusion of a column of R-matrices, the quantum determinant of
//! the fundamental evaluation representation, and a small noncommutative algebra
//! engine for the shift-operator coefficient algebra. Every identity the
//! construction relies on (dynamical Yang-Baxter relation, projector properties,
//! fusion antisymmetry, centrality of the dressed quantum determinant, ...) has a
//! numerical check that reports a residual against a pinned tolerance.
//!
//! Index convention used throughout: a tensor on `V^{⊗k}` stores its lower
//! (incoming) indices first and its upper (outgoing) indices second. Viewed as an
//! operator, rows are incoming multi-indices and columns outgoing ones, so
//! products are written in the order the factors act.

pub mod algebra;
pub mod check;
pub mod error;
pub mod face;
pub mod fusion;
pub mod lattice;
pub mod ops;
pub mod qdet;
pub mod sampling;
pub mod tensor;
pub mod theta;
pub mod verify;

pub use error::{Error, Result};
pub use lattice::DynWeight;
pub use tensor::DenseTensor;
pub use theta::{ModularParams, ThetaChar, C64};
