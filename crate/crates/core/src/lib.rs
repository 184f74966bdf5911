//! Outer generalized inverses `A_{T,S}^{(2)}` of complex matrices and the
//! numerical validation of their perturbation bounds.
//!
//! * [`numlin`]: dense complex matrices, SVD, pseudoinverse, solves.
//! * [`subspace`]: orthonormal-basis subspaces, projectors, gap metric.
//! * [`outer_inverse`]: existence, computation, independent oracle and the
//!   classical special cases (Moore-Penrose, group, Drazin, Bott-Duffin).
//! * [`perturbation`]: perturbed-inverse representations and their bounds.
//! * [`instance_gen`]: seeded generation of feasible problems and
//!   perturbations with exactly controlled gaps and norms.

pub mod error;
pub mod hypothesis;
pub mod instance_gen;
pub mod numlin;
pub mod outer_inverse;
pub mod perturbation;
pub mod subspace;

pub use error::{Error, ExistenceFailure, Result};
pub use hypothesis::HypothesisStatus;
pub use numlin::{Matrix, ToleranceProfile, C64};
pub use outer_inverse::OuterInverseProblem;
pub use perturbation::{BoundReport, PerturbationScenario, Theorem};
pub use subspace::Subspace;
