//! Dense complex linear algebra: the matrix type, SVD and the kernels built on it.
//!
//! The SVD is the only place rank is decided. Pseudoinverses, norms,
//! subspace bases and projectors all go through [`svd`].

mod matrix;
mod ops;
mod svd;
mod tolerance;

pub use matrix::{dot, vec_norm, Matrix, C64};
pub use ops::{condition_number, inverse, op_norm, pinv, rank, relative_error, solve_square};
pub use svd::{svd, SvdFactors};
pub use tolerance::ToleranceProfile;
