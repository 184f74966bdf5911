//! The outer inverse `A_{T,S}^{(2)}`: the unique `G` with `GAG = G`,
//! `R(G) = T` and `N(G) = S`.
//!
//! Two independent routes are provided. [`compute`] takes the
//! pseudoinverse of the compressed operator `P_{S⊥} A P_T`; [`oracle_compute`]
//! solves the defining equations directly as `U (W*AU)⁻¹ W*` with
//! `U = basis(T)`, `W = basis(S⊥)`. They share no rank decision.

use serde::{Deserialize, Serialize};

use crate::error::{Error, ExistenceFailure, Result};
use crate::numlin::{op_norm, pinv, rank, solve_square, Matrix, ToleranceProfile};
use crate::subspace::{direct_sum_is_whole, gap_hat, intersection_trivial, Subspace};

/// The data `(A, T, S)` with `A: ℂⁿ → ℂᵐ`, `T ⊂ ℂⁿ`, `S ⊂ ℂᵐ`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "ProblemRepr", into = "ProblemRepr")]
pub struct OuterInverseProblem {
    a: Matrix,
    t: Subspace,
    s: Subspace,
}

#[derive(Serialize, Deserialize)]
struct ProblemRepr {
    #[serde(rename = "A")]
    a: Matrix,
    #[serde(rename = "T")]
    t: Subspace,
    #[serde(rename = "S")]
    s: Subspace,
}

impl TryFrom<ProblemRepr> for OuterInverseProblem {
    type Error = Error;

    fn try_from(r: ProblemRepr) -> Result<Self> {
        OuterInverseProblem::new(r.a, r.t, r.s)
    }
}

impl From<OuterInverseProblem> for ProblemRepr {
    fn from(p: OuterInverseProblem) -> Self {
        ProblemRepr { a: p.a, t: p.t, s: p.s }
    }
}

impl OuterInverseProblem {
    pub fn new(a: Matrix, t: Subspace, s: Subspace) -> Result<Self> {
        let (m, n) = a.shape();
        if t.ambient_dim() != n || s.ambient_dim() != m {
            return Err(Error::DimensionMismatch(format!(
                "A is {m}x{n} but T lives in ℂ^{} and S in ℂ^{}",
                t.ambient_dim(),
                s.ambient_dim()
            )));
        }
        Ok(OuterInverseProblem { a, t, s })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn t(&self) -> &Subspace {
        &self.t
    }

    pub fn s(&self) -> &Subspace {
        &self.s
    }

    pub fn with_t(&self, t: Subspace) -> Result<Self> {
        OuterInverseProblem::new(self.a.clone(), t, self.s.clone())
    }

    pub fn with_s(&self, s: Subspace) -> Result<Self> {
        OuterInverseProblem::new(self.a.clone(), self.t.clone(), s)
    }

    pub fn with_a(&self, a: Matrix) -> Result<Self> {
        OuterInverseProblem::new(a, self.t.clone(), self.s.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExistenceCertificate {
    pub kernel_meets_t_trivially: bool,
    pub at_dim: usize,
    pub direct_sum_holds: bool,
    pub exists: bool,
}

impl ExistenceCertificate {
    pub fn failure(&self) -> Option<ExistenceFailure> {
        match (self.kernel_meets_t_trivially, self.direct_sum_holds) {
            (true, true) => None,
            (false, true) => Some(ExistenceFailure::KernelIntersection),
            (true, false) => Some(ExistenceFailure::DirectSum),
            (false, false) => Some(ExistenceFailure::Both),
        }
    }
}

/// Checks `N(A) ∩ T = {0}` and `AT ∔ S = ℂᵐ`.
pub fn existence(problem: &OuterInverseProblem, tol: &ToleranceProfile) -> Result<ExistenceCertificate> {
    let kernel = Subspace::kernel_of(&problem.a, tol)?;
    let kernel_meets_t_trivially = intersection_trivial(&kernel, &problem.t, tol)?;
    let at = problem.t.image_under(&problem.a, tol)?;
    let direct_sum_holds = direct_sum_is_whole(&at, &problem.s, tol)?;
    Ok(ExistenceCertificate {
        kernel_meets_t_trivially,
        at_dim: at.dim(),
        direct_sum_holds,
        exists: kernel_meets_t_trivially && direct_sum_holds,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `‖GAG − G‖`.
    pub gag: f64,
    /// `δ̂(R(G), T)`.
    pub range_gap: f64,
    /// `δ̂(N(G), S)`.
    pub null_gap: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OuterInverseResult {
    #[serde(rename = "G")]
    pub g: Matrix,
    pub residuals: Residuals,
}

impl OuterInverseResult {
    /// The defining equations hold within `verify_atol`.
    pub fn satisfies_definition(&self, tol: &ToleranceProfile) -> Result<bool> {
        let gnorm = op_norm(&self.g)?;
        Ok(self.residuals.gag <= tol.verify_atol * (1.0 + gnorm)
            && self.residuals.range_gap <= tol.verify_atol
            && self.residuals.null_gap <= tol.verify_atol)
    }
}

/// Residuals of `G` against the defining equations of `A_{T,S}^{(2)}`.
pub fn defining_residuals(problem: &OuterInverseProblem, g: &Matrix, tol: &ToleranceProfile) -> Result<Residuals> {
    let gag = &(g * &problem.a) * g;
    Ok(Residuals {
        gag: op_norm(&(&gag - g))?,
        range_gap: gap_hat(&Subspace::range_of(g, tol)?, &problem.t)?,
        null_gap: gap_hat(&Subspace::kernel_of(g, tol)?, &problem.s)?,
    })
}

/// `A_{T,S}^{(2)} = (P_{S⊥} A P_T)⁺`.
pub fn compute(problem: &OuterInverseProblem, tol: &ToleranceProfile) -> Result<OuterInverseResult> {
    let cert = existence(problem, tol)?;
    if let Some(why) = cert.failure() {
        return Err(Error::NotExists(why));
    }
    let g = compress_and_invert(problem, tol)?;
    let residuals = defining_residuals(problem, &g, tol)?;
    Ok(OuterInverseResult { g, residuals })
}

/// The pseudoinverse route without the existence check.
pub(crate) fn compress_and_invert(problem: &OuterInverseProblem, tol: &ToleranceProfile) -> Result<Matrix> {
    let p_s_perp = problem.s.orthogonal_complement()?.projector();
    let compressed = &(&p_s_perp * &problem.a) * &problem.t.projector();
    pinv(&compressed, tol)
}

/// `U (W*AU)⁻¹ W*` with `U = basis(T)` and `W = basis(S⊥)`.
///
/// Fails when `dim T ≠ codim S` or when `W*AU` is too ill-conditioned to
/// invert; either means the outer inverse does not exist (numerically).
pub fn oracle_compute(problem: &OuterInverseProblem, tol: &ToleranceProfile) -> Result<Matrix> {
    let u = problem.t.basis();
    let w = problem.s.orthogonal_complement()?;
    if w.dim() != u.cols() {
        return Err(Error::NotExists(ExistenceFailure::DirectSum));
    }
    let w_adj = w.basis().adjoint();
    let middle = &(&w_adj * &problem.a) * u;
    let x = solve_square(&middle, &w_adj, tol)?;
    Ok(u * &x)
}

/// `A⁺ = P_{N(A)⊥} Z P_{R(A)}` for a `{1,2}`-inverse `Z` of `A`.
pub fn mp_via_12_inverse(a: &Matrix, z: &Matrix, tol: &ToleranceProfile) -> Result<Matrix> {
    if z.shape() != (a.cols(), a.rows()) {
        return Err(Error::DimensionMismatch(format!(
            "Z is {}x{} but A is {}x{}",
            z.rows(),
            z.cols(),
            a.rows(),
            a.cols()
        )));
    }
    let aza = op_norm(&(&(&(a * z) * a) - a))?;
    let zaz = op_norm(&(&(&(z * a) * z) - z))?;
    if aza > tol.verify_atol * (1.0 + op_norm(a)?) || zaz > tol.verify_atol * (1.0 + op_norm(z)?) {
        return Err(Error::NotInner12Inverse { aza, zaz });
    }
    let p_row = Subspace::kernel_of(a, tol)?.orthogonal_complement()?.projector();
    let p_range = Subspace::range_of(a, tol)?.projector();
    Ok(&(&p_row * z) * &p_range)
}

#[derive(Clone, Debug)]
pub enum ClassicalInverse {
    MoorePenrose,
    Group,
    Drazin,
    /// Bott-Duffin inverse for the constraint subspace `L`.
    BottDuffin(Subspace),
}

/// Smallest `k` with `rank(A^{k+1}) = rank(A^k)`.
pub fn drazin_index(a: &Matrix, tol: &ToleranceProfile) -> Result<usize> {
    require_square(a, "Drazin inverse")?;
    let n = a.rows();
    let mut power = Matrix::identity(n);
    let mut prev = n;
    for k in 0..=n {
        let next_power = &power * a;
        let r = rank(&next_power, tol)?;
        if r == prev {
            return Ok(k);
        }
        prev = r;
        power = next_power;
    }
    // Ranks strictly decrease at most n times.
    unreachable!("rank sequence failed to stabilize within n steps")
}

fn require_square(a: &Matrix, what: &str) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Precondition(format!("{what} needs a square matrix, got {}x{}", a.rows(), a.cols())));
    }
    Ok(())
}

/// The `(T, S)` pair that reduces a classical inverse to `A_{T,S}^{(2)}`.
pub fn classical_problem(a: &Matrix, which: &ClassicalInverse, tol: &ToleranceProfile) -> Result<OuterInverseProblem> {
    let (t, s) = match which {
        ClassicalInverse::MoorePenrose => (
            Subspace::kernel_of(a, tol)?.orthogonal_complement()?,
            Subspace::range_of(a, tol)?.orthogonal_complement()?,
        ),
        ClassicalInverse::Group => {
            require_square(a, "group inverse")?;
            let r1 = rank(a, tol)?;
            let r2 = rank(&(a * a), tol)?;
            if r1 != r2 {
                return Err(Error::Precondition(format!("group inverse needs rank(A^2) = rank(A), got {r2} vs {r1}")));
            }
            (Subspace::range_of(a, tol)?, Subspace::kernel_of(a, tol)?)
        }
        ClassicalInverse::Drazin => {
            let k = drazin_index(a, tol)?;
            let mut power = Matrix::identity(a.rows());
            for _ in 0..k {
                power = &power * a;
            }
            (Subspace::range_of(&power, tol)?, Subspace::kernel_of(&power, tol)?)
        }
        ClassicalInverse::BottDuffin(l) => {
            require_square(a, "Bott-Duffin inverse")?;
            (l.clone(), l.orthogonal_complement()?)
        }
    };
    OuterInverseProblem::new(a.clone(), t, s)
}

pub fn classical_cases(a: &Matrix, which: &ClassicalInverse, tol: &ToleranceProfile) -> Result<OuterInverseResult> {
    let problem = classical_problem(a, which, tol)?;
    match compute(&problem, tol) {
        Err(Error::NotExists(why)) if matches!(which, ClassicalInverse::BottDuffin(_)) => {
            Err(Error::Precondition(format!("Bott-Duffin inverse does not exist for this constraint subspace: {why}")))
        }
        other => other,
    }
}
