//! The coefficient algebra: generators `A^{i'}_i` whose coefficients are
//! functions of a pair of dynamical weights, with exchange relations, a
//! normal-form rewriter, and the determinant-type central element.

pub mod center;
pub mod coeffs;
pub mod elem;
pub mod lattice_fn;
pub mod rewrite;

pub use center::{center_element, center_rank, check_center_commutes, CenterForm, CenterReport, RankReport};
pub use coeffs::{check_y_relations, extract_coefficients, CoeffData, ProbeBrackets, TabulatedBrackets, UnitBrackets};
pub use elem::{AlgElem, Generator, Word};
pub use lattice_fn::{Affine, Env, LatticeFn, LatticePoint};
pub use rewrite::{normal_form, Eq24Reading, NormalForm};
