//! Subspaces of ℂⁿ held as orthonormal bases, with the gap metric and
//! direct-sum machinery.
//!
//! Equality of subspaces is always decided by the gap, never by comparing
//! bases, since bases are not unique.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypothesis::HypothesisStatus;
use crate::numlin::{op_norm, solve_square, svd, vec_norm, Matrix, ToleranceProfile, C64};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "SubspaceRepr", into = "SubspaceRepr")]
pub struct Subspace {
    ambient_dim: usize,
    /// `ambient_dim x dim`, orthonormal columns.
    basis: Matrix,
}

#[derive(Serialize, Deserialize)]
struct SubspaceRepr {
    ambient_dim: usize,
    basis: Matrix,
}

impl TryFrom<SubspaceRepr> for Subspace {
    type Error = Error;

    /// Re-orthonormalizes the declared basis; its rank must match its
    /// column count.
    fn try_from(repr: SubspaceRepr) -> Result<Self> {
        if repr.basis.rows() != repr.ambient_dim {
            return Err(Error::DimensionMismatch(format!(
                "basis has {} rows but ambient_dim is {}",
                repr.basis.rows(),
                repr.ambient_dim
            )));
        }
        let declared = repr.basis.cols();
        let s = Subspace::from_spanning_set(&repr.basis, &ToleranceProfile::default())?;
        if s.dim() != declared {
            return Err(Error::RankMismatch { rank: s.dim(), declared });
        }
        Ok(s)
    }
}

impl From<Subspace> for SubspaceRepr {
    fn from(s: Subspace) -> Self {
        SubspaceRepr { ambient_dim: s.ambient_dim, basis: s.basis }
    }
}

impl Subspace {
    /// Orthonormal basis of the column span of `vectors`.
    pub fn from_spanning_set(vectors: &Matrix, tol: &ToleranceProfile) -> Result<Self> {
        let (n, k) = vectors.shape();
        let f = svd(vectors)?;
        let r = f.rank_with(tol.rank_rtol_for(n, k));
        Ok(Subspace { ambient_dim: n, basis: f.left_vectors.select_columns(0..r) })
    }

    /// Wraps columns already known to be orthonormal.
    pub(crate) fn from_orthonormal(basis: Matrix) -> Self {
        Subspace { ambient_dim: basis.rows(), basis }
    }

    pub fn trivial(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: Matrix::zeros(ambient_dim, 0) }
    }

    pub fn whole(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: Matrix::identity(ambient_dim) }
    }

    /// `span{vectors}` for a list of column vectors.
    pub fn span(ambient_dim: usize, vectors: &[Vec<C64>], tol: &ToleranceProfile) -> Result<Self> {
        if vectors.iter().any(|v| v.len() != ambient_dim) {
            return Err(Error::DimensionMismatch("spanning vector length differs from ambient_dim".into()));
        }
        Subspace::from_spanning_set(&Matrix::from_columns(ambient_dim, vectors), tol)
    }

    /// `R(A)`.
    pub fn range_of(a: &Matrix, tol: &ToleranceProfile) -> Result<Self> {
        Subspace::from_spanning_set(a, tol)
    }

    /// `N(A)`: right singular vectors past the numerical rank.
    pub fn kernel_of(a: &Matrix, tol: &ToleranceProfile) -> Result<Self> {
        let (m, n) = a.shape();
        let f = svd(a)?;
        let r = f.rank_with(tol.rank_rtol_for(m, n));
        Ok(Subspace { ambient_dim: n, basis: f.right_vectors.select_columns(r..n) })
    }

    /// The image `A V`.
    pub fn image_under(&self, a: &Matrix, tol: &ToleranceProfile) -> Result<Self> {
        Subspace::from_spanning_set(&a.try_mul(&self.basis)?, tol)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    /// Orthogonal projector `B B*`.
    pub fn projector(&self) -> Matrix {
        &self.basis * &self.basis.adjoint()
    }

    /// `‖x − P x‖`.
    pub fn dist(&self, x: &[C64]) -> Result<f64> {
        if x.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in {}-dimensional space",
                x.len(),
                self.ambient_dim
            )));
        }
        let xv = Matrix::column_vector(x);
        let coeff = &self.basis.adjoint() * &xv;
        let proj = &self.basis * &coeff;
        Ok(vec_norm((&xv - &proj).as_slice()))
    }

    pub fn orthogonal_complement(&self) -> Result<Subspace> {
        let f = svd(&self.basis)?;
        Ok(Subspace {
            ambient_dim: self.ambient_dim,
            basis: f.left_vectors.select_columns(self.dim()..self.ambient_dim),
        })
    }

    /// Gap-based equality test.
    pub fn approx_eq(&self, other: &Subspace, atol: f64) -> Result<bool> {
        Ok(gap_hat(self, other)? <= atol)
    }

    fn check_same_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch(format!(
                "subspaces of ℂ^{} and ℂ^{}",
                self.ambient_dim, other.ambient_dim
            )));
        }
        Ok(())
    }
}

/// Directed gap `δ(M, N) = ‖(I − P_N) P_M‖`; zero when `M = {0}`.
pub fn delta(m: &Subspace, n: &Subspace) -> Result<f64> {
    m.check_same_ambient(n)?;
    if m.dim() == 0 {
        return Ok(0.0);
    }
    let complement = &Matrix::identity(n.ambient_dim) - &n.projector();
    op_norm(&(&complement * &m.projector()))
}

/// Symmetric gap `δ̂(M, N) = ‖P_M − P_N‖`.
pub fn gap_hat(m: &Subspace, n: &Subspace) -> Result<f64> {
    m.check_same_ambient(n)?;
    op_norm(&(&m.projector() - &n.projector()))
}

/// `M ∩ N = {0}`, decided by the rank of `[basis(M) | basis(N)]`.
pub fn intersection_trivial(m: &Subspace, n: &Subspace, tol: &ToleranceProfile) -> Result<bool> {
    m.check_same_ambient(n)?;
    let total = m.dim() + n.dim();
    if total == 0 {
        return Ok(true);
    }
    if total > m.ambient_dim {
        return Ok(false);
    }
    let joined = m.basis.hcat(&n.basis)?;
    Ok(crate::numlin::rank(&joined, tol)? == total)
}

/// `M ∔ N` equals the whole space.
pub fn direct_sum_is_whole(m: &Subspace, n: &Subspace, tol: &ToleranceProfile) -> Result<bool> {
    m.check_same_ambient(n)?;
    Ok(m.dim() + n.dim() == m.ambient_dim && intersection_trivial(m, n, tol)?)
}

/// Idempotent with prescribed range and null space.
#[derive(Clone, Debug)]
pub struct ObliqueProjector {
    pub matrix: Matrix,
    pub range_space: Subspace,
    pub null_space: Subspace,
}

/// Projector onto `range` along `nullsp`, formed as `U (W*U)⁻¹ W*` with
/// `U = basis(range)` and `W = basis(nullsp^⊥)`.
pub fn oblique_projector(range: &Subspace, nullsp: &Subspace, tol: &ToleranceProfile) -> Result<ObliqueProjector> {
    if !direct_sum_is_whole(range, nullsp, tol)? {
        return Err(Error::NotDirectSum);
    }
    let u = range.basis();
    let w = nullsp.orthogonal_complement()?;
    let wu = &w.basis().adjoint() * u;
    let middle = solve_square(&wu, &w.basis().adjoint(), tol)?;
    Ok(ObliqueProjector { matrix: u * &middle, range_space: range.clone(), null_space: nullsp.clone() })
}

impl ObliqueProjector {
    pub fn norm(&self) -> Result<f64> {
        op_norm(&self.matrix)
    }

    /// `‖P² − P‖`.
    pub fn idempotency_residual(&self) -> Result<f64> {
        op_norm(&(&(&self.matrix * &self.matrix) - &self.matrix))
    }
}

#[derive(Clone, Debug)]
pub struct ComplementednessReport {
    /// `δ̂(R(P), M′) < 1/(1+‖P‖)`.
    pub hypothesis: HypothesisStatus,
    /// `R(I − P) ∔ M′` is the whole space.
    pub complemented: bool,
}

/// Checks whether `M′` complements `R(I − P) = N(P)`, and whether the
/// small-gap hypothesis that guarantees it holds.
pub fn complementedness_check(
    p: &ObliqueProjector,
    m_prime: &Subspace,
    tol: &ToleranceProfile,
) -> Result<ComplementednessReport> {
    let gap = gap_hat(&p.range_space, m_prime)?;
    let threshold = 1.0 / (1.0 + p.norm()?);
    Ok(ComplementednessReport {
        hypothesis: HypothesisStatus::new("complemented_subspace", threshold, gap),
        complemented: direct_sum_is_whole(&p.null_space, m_prime, tol)?,
    })
}
