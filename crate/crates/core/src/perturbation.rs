//! Perturbation of `A_{T,S}^{(2)}` under changes of `T`, `S` and `A`.
//!
//! Every operation evaluates a closed-form representation of the perturbed
//! inverse, recomputes the same inverse independently with
//! [`oracle_compute`], and compares both the representation and the
//! measured norms against the corresponding error bounds. Hypotheses are
//! strict inequalities; when one fails the formula is still evaluated but
//! the report is marked unsatisfied and no bound is claimed.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypothesis::HypothesisStatus;
use crate::numlin::{inverse, op_norm, pinv, relative_error, solve_square, Matrix, ToleranceProfile};
use crate::outer_inverse::{compute, oracle_compute, OuterInverseProblem};
use crate::subspace::{delta, gap_hat, intersection_trivial, Subspace};

/// The golden ratio `(1+√5)/2`, the constant in the difference bounds.
pub const GOLDEN: f64 = 1.618_033_988_749_895;

/// Relative slack on every bound comparison.
pub const BOUND_RTOL: f64 = 1e-10;
/// Absolute slack, scaled by `‖G‖`, for bounds that vanish at zero perturbation.
pub const BOUND_ATOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theorem {
    /// Stable perturbation of the Moore-Penrose inverse.
    Lemma21,
    /// Gap propagation `δ̂(AT, AT′)`.
    Lemma31,
    /// `T` perturbed.
    Prop31,
    /// `S` perturbed.
    Prop32,
    /// `T` and `S` perturbed.
    Thm31,
    /// `A` perturbed.
    Lemma32,
    /// `T`, `S` and `A` perturbed.
    Thm32,
}

impl Theorem {
    pub const ALL: [Theorem; 7] = [
        Theorem::Lemma21,
        Theorem::Lemma31,
        Theorem::Prop31,
        Theorem::Prop32,
        Theorem::Thm31,
        Theorem::Lemma32,
        Theorem::Thm32,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Theorem::Lemma21 => "lemma21",
            Theorem::Lemma31 => "lemma31",
            Theorem::Prop31 => "prop31",
            Theorem::Prop32 => "prop32",
            Theorem::Thm31 => "thm31",
            Theorem::Lemma32 => "lemma32",
            Theorem::Thm32 => "thm32",
        }
    }

    pub fn perturbs_t(&self) -> bool {
        matches!(self, Theorem::Lemma31 | Theorem::Prop31 | Theorem::Thm31 | Theorem::Thm32)
    }

    pub fn perturbs_s(&self) -> bool {
        matches!(self, Theorem::Prop32 | Theorem::Thm31 | Theorem::Thm32)
    }

    pub fn perturbs_a(&self) -> bool {
        matches!(self, Theorem::Lemma21 | Theorem::Lemma32 | Theorem::Thm32)
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown theorem '{s}'")))
    }
}

/// Gap and norm thresholds of each theorem as functions of `‖A‖` and `‖G‖`.
#[derive(Clone, Copy, Debug)]
pub struct Thresholds {
    pub a_norm: f64,
    pub g_norm: f64,
}

impl Thresholds {
    fn kappa(&self) -> f64 {
        self.a_norm * self.g_norm
    }

    /// Bound on `δ̂(T, T′)` for the given theorem, if it perturbs `T`.
    pub fn gap_t(&self, theorem: Theorem) -> Option<f64> {
        let k = self.kappa();
        match theorem {
            Theorem::Lemma31 => Some(1.0 / (1.0 + k)),
            Theorem::Prop31 | Theorem::Thm31 | Theorem::Thm32 => Some(1.0 / (1.0 + k).powi(2)),
            _ => None,
        }
    }

    /// Bound on `δ̂(S, S′)`.
    pub fn gap_s(&self, theorem: Theorem) -> Option<f64> {
        let k = self.kappa();
        match theorem {
            Theorem::Prop32 => Some(1.0 / (2.0 + k)),
            Theorem::Thm31 | Theorem::Thm32 => Some(1.0 / (1.0 + k).powi(2)),
            _ => None,
        }
    }

    /// Bound on `‖E‖`. For [`Theorem::Lemma21`] `g_norm` is `‖A⁺‖`.
    pub fn norm_e(&self, theorem: Theorem) -> Option<f64> {
        match theorem {
            Theorem::Lemma21 | Theorem::Lemma32 => Some(1.0 / self.g_norm),
            Theorem::Thm32 => Some(1.0 / (self.g_norm * (1.0 + self.kappa()))),
            _ => None,
        }
    }
}

/// A base problem together with perturbed `T′`, `S′` and `E = Ā − A`.
/// The gaps and `‖E‖` are always recomputed from the parts.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "ScenarioRepr", into = "ScenarioRepr")]
pub struct PerturbationScenario {
    base: OuterInverseProblem,
    t_prime: Subspace,
    s_prime: Subspace,
    e: Matrix,
    measured_gap_t: f64,
    measured_gap_s: f64,
    norm_e: f64,
}

#[derive(Serialize, Deserialize)]
struct ScenarioRepr {
    base: OuterInverseProblem,
    t_prime: Subspace,
    s_prime: Subspace,
    #[serde(rename = "E")]
    e: Matrix,
}

impl TryFrom<ScenarioRepr> for PerturbationScenario {
    type Error = Error;

    fn try_from(r: ScenarioRepr) -> Result<Self> {
        PerturbationScenario::new(r.base, r.t_prime, r.s_prime, r.e)
    }
}

impl From<PerturbationScenario> for ScenarioRepr {
    fn from(s: PerturbationScenario) -> Self {
        ScenarioRepr { base: s.base, t_prime: s.t_prime, s_prime: s.s_prime, e: s.e }
    }
}

impl PerturbationScenario {
    pub fn new(base: OuterInverseProblem, t_prime: Subspace, s_prime: Subspace, e: Matrix) -> Result<Self> {
        if e.shape() != base.a().shape() {
            return Err(Error::DimensionMismatch(format!(
                "E is {}x{} but A is {}x{}",
                e.rows(),
                e.cols(),
                base.a().rows(),
                base.a().cols()
            )));
        }
        let measured_gap_t = gap_hat(base.t(), &t_prime)?;
        let measured_gap_s = gap_hat(base.s(), &s_prime)?;
        let norm_e = op_norm(&e)?;
        Ok(PerturbationScenario { base, t_prime, s_prime, e, measured_gap_t, measured_gap_s, norm_e })
    }

    /// The scenario with nothing perturbed.
    pub fn unperturbed(base: OuterInverseProblem) -> Result<Self> {
        let (t, s) = (base.t().clone(), base.s().clone());
        let e = Matrix::zeros(base.a().rows(), base.a().cols());
        PerturbationScenario::new(base, t, s, e)
    }

    pub fn base(&self) -> &OuterInverseProblem {
        &self.base
    }

    pub fn t_prime(&self) -> &Subspace {
        &self.t_prime
    }

    pub fn s_prime(&self) -> &Subspace {
        &self.s_prime
    }

    pub fn e(&self) -> &Matrix {
        &self.e
    }

    pub fn measured_gap_t(&self) -> f64 {
        self.measured_gap_t
    }

    pub fn measured_gap_s(&self) -> f64 {
        self.measured_gap_s
    }

    pub fn norm_e(&self) -> f64 {
        self.norm_e
    }
}

/// Formula result, oracle result and bound comparison for one theorem.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub theorem: Theorem,
    pub formula_result: Matrix,
    /// `None` when the oracle could not be evaluated (only possible when a
    /// hypothesis fails).
    pub oracle_result: Option<Matrix>,
    pub formula_vs_oracle_relerr: Option<f64>,
    pub norm_bound: f64,
    pub norm_actual: f64,
    pub diff_bound: f64,
    pub diff_actual: f64,
    /// `‖G‖` of the unperturbed inverse (`‖A⁺‖` for the stable-perturbation lemma).
    pub base_norm: f64,
    pub hypotheses: Vec<HypothesisStatus>,
    /// Discrepancy between the two equivalent forms of a representation, when
    /// the theorem states two.
    pub alt_form_residual: Option<f64>,
    pub all_satisfied: bool,
}

impl BoundReport {
    pub fn hypotheses_met(&self) -> bool {
        self.hypotheses.iter().all(HypothesisStatus::clearly_satisfied)
    }

    fn slack(&self) -> f64 {
        BOUND_ATOL * self.base_norm.max(1.0)
    }

    pub fn norm_holds(&self) -> bool {
        self.norm_actual <= self.norm_bound * (1.0 + BOUND_RTOL) + self.slack()
    }

    pub fn diff_holds(&self) -> bool {
        self.diff_actual <= self.diff_bound * (1.0 + BOUND_RTOL) + self.slack()
    }

    /// A bound failed although every hypothesis held.
    pub fn is_violation(&self) -> bool {
        self.hypotheses_met() && !(self.norm_holds() && self.diff_holds())
    }

    /// `(bound − actual) / bound` for the norm bound, with the absolute slack
    /// as the denominator when the bound is smaller than it.
    pub fn margin_norm(&self) -> f64 {
        margin(self.norm_bound, self.norm_actual, self.slack())
    }

    pub fn margin_diff(&self) -> f64 {
        margin(self.diff_bound, self.diff_actual, self.slack())
    }

    fn finish(mut self) -> Self {
        self.all_satisfied = self.hypotheses_met() && self.norm_holds() && self.diff_holds();
        self
    }
}

/// Relative room left under a bound; negative when `actual` exceeds it.
pub fn margin(bound: f64, actual: f64, slack: f64) -> f64 {
    (bound - actual) / bound.max(slack)
}

/// The unperturbed inverse and the quantities every bound is built from.
struct Base {
    a: Matrix,
    g: Matrix,
    a_norm: f64,
    g_norm: f64,
    p_t: Matrix,
    p_s_perp: Matrix,
}

impl Base {
    fn new(problem: &OuterInverseProblem, tol: &ToleranceProfile) -> Result<Self> {
        let g = compute(problem, tol)?.g;
        Ok(Base {
            a: problem.a().clone(),
            a_norm: op_norm(problem.a())?,
            g_norm: op_norm(&g)?,
            g,
            p_t: problem.t().projector(),
            p_s_perp: problem.s().orthogonal_complement()?.projector(),
        })
    }

    fn thresholds(&self) -> Thresholds {
        Thresholds { a_norm: self.a_norm, g_norm: self.g_norm }
    }

    fn n(&self) -> usize {
        self.a.cols()
    }

    /// `(I_X + G P_{S⊥} A (P_{T′} − P_T))⁻¹ G`, the inner factor shared by the
    /// `T`-perturbation representations.
    fn t_resolvent_times_g(&self, p_t_prime: &Matrix, tol: &ToleranceProfile) -> Result<Matrix> {
        let shift = &(&(&self.g * &self.p_s_perp) * &self.a) * &(p_t_prime - &self.p_t);
        let middle = &Matrix::identity(self.n()) + &shift;
        solve_square(&middle, &self.g, tol)
    }

    /// `A_{T′,S}^{(2)} = P_{T′}(I_X + G P_{S⊥} A (P_{T′} − P_T))⁻¹ G P_{S⊥}`.
    fn t_formula(&self, t_prime: &Subspace, tol: &ToleranceProfile) -> Result<Matrix> {
        let p_t_prime = t_prime.projector();
        let inner = self.t_resolvent_times_g(&p_t_prime, tol)?;
        Ok(&(&p_t_prime * &inner) * &self.p_s_perp)
    }

    /// `A_{T,S′}^{(2)} = P_T(I_X + G (P_{S′⊥} − P_{S⊥}) A P_T)⁻¹ G P_{S′⊥}`.
    fn s_formula(&self, s_prime: &Subspace, tol: &ToleranceProfile) -> Result<Matrix> {
        let p_s_prime_perp = s_prime.orthogonal_complement()?.projector();
        let shift = &(&(&self.g * &(&p_s_prime_perp - &self.p_s_perp)) * &self.a) * &self.p_t;
        let middle = &Matrix::identity(self.n()) + &shift;
        let x = solve_square(&middle, &(&self.g * &p_s_prime_perp), tol)?;
        Ok(&self.p_t * &x)
    }

    /// `A_{T′,S′}^{(2)}` as the nested two-resolvent expression:
    /// with `K = P_{T′}(I + G P_{S⊥} A (P_{T′} − P_T))⁻¹ G`,
    /// `P_{T′}[I_X + K (P_{S⊥}P_{S′⊥} − P_{S⊥}) A P_{T′}]⁻¹ K P_{S⊥} P_{S′⊥}`.
    fn ts_formula(&self, t_prime: &Subspace, s_prime: &Subspace, tol: &ToleranceProfile) -> Result<Matrix> {
        let p_t_prime = t_prime.projector();
        let p_s_prime_perp = s_prime.orthogonal_complement()?.projector();
        let k = &p_t_prime * &self.t_resolvent_times_g(&p_t_prime, tol)?;
        let ps_ps_prime = &self.p_s_perp * &p_s_prime_perp;
        let shift = &(&k * &(&ps_ps_prime - &self.p_s_perp)) * &(&self.a * &p_t_prime);
        let outer = &Matrix::identity(self.n()) + &shift;
        let x = solve_square(&outer, &(&k * &ps_ps_prime), tol)?;
        Ok(&p_t_prime * &x)
    }
}

/// `(I_X + G E)⁻¹ G`.
fn a_formula_left(g: &Matrix, e: &Matrix, tol: &ToleranceProfile) -> Result<Matrix> {
    let middle = &Matrix::identity(g.rows()) + &(g * e);
    solve_square(&middle, g, tol)
}

/// `G (I_Y + E G)⁻¹`, solved through the adjoint system.
fn a_formula_right(g: &Matrix, e: &Matrix, tol: &ToleranceProfile) -> Result<Matrix> {
    let middle = &Matrix::identity(e.rows()) + &(e * g);
    Ok(solve_square(&middle.adjoint(), &g.adjoint(), tol)?.adjoint())
}

fn oracle_and_relerr(
    problem: Result<OuterInverseProblem>,
    formula: &Matrix,
    tol: &ToleranceProfile,
) -> Result<(Option<Matrix>, Option<f64>)> {
    match problem.and_then(|p| oracle_compute(&p, tol)) {
        Ok(o) => {
            let rel = relative_error(formula, &o)?;
            Ok((Some(o), Some(rel)))
        }
        Err(Error::IllConditioned { .. }) | Err(Error::NotExists(_)) => Ok((None, None)),
        Err(e) => Err(e),
    }
}

/// Stable-perturbation equivalences for `Ā = A + dA`.
#[derive(Clone, Debug)]
pub struct StableReport {
    /// `‖A⁺‖‖dA‖ < 1`.
    pub hypothesis: HypothesisStatus,
    /// `R(Ā) ∩ R(A)⊥ = {0}`.
    pub cond1: bool,
    /// `N(Ā)⊥ ∩ N(A) = {0}`.
    pub cond2: bool,
    /// `C = A⁺(I + dA A⁺)⁻¹` is a `{1,2}`-inverse of `Ā`.
    pub cond3_formula_valid: bool,
    pub gi_matrix: Option<Matrix>,
}

impl StableReport {
    pub fn conditions_agree(&self) -> bool {
        self.cond1 == self.cond2 && self.cond2 == self.cond3_formula_valid
    }
}

pub fn is_stable(a: &Matrix, da: &Matrix, tol: &ToleranceProfile) -> Result<StableReport> {
    let a_bar = a.try_add(da)?;
    let a_pinv = pinv(a, tol)?;
    let hypothesis = HypothesisStatus::new("lemma21.pinv_norm_times_norm_dA", 1.0, op_norm(&a_pinv)? * op_norm(da)?);

    let r_a_perp = Subspace::range_of(a, tol)?.orthogonal_complement()?;
    let cond1 = intersection_trivial(&Subspace::range_of(&a_bar, tol)?, &r_a_perp, tol)?;
    let n_a_bar_perp = Subspace::kernel_of(&a_bar, tol)?.orthogonal_complement()?;
    let cond2 = intersection_trivial(&n_a_bar_perp, &Subspace::kernel_of(a, tol)?, tol)?;

    let resolvent = &Matrix::identity(a.rows()) + &(da * &a_pinv);
    let gi = match inverse(&resolvent, tol) {
        Ok(inv) => Some(&a_pinv * &inv),
        Err(Error::IllConditioned { .. }) => None,
        Err(e) => return Err(e),
    };
    let cond3_formula_valid = match &gi {
        Some(c) => {
            let r1 = op_norm(&(&(&(&a_bar * c) * &a_bar) - &a_bar))?;
            let r2 = op_norm(&(&(&(c * &a_bar) * c) - c))?;
            r1 <= tol.verify_atol * (1.0 + op_norm(&a_bar)?) && r2 <= tol.verify_atol * (1.0 + op_norm(c)?)
        }
        None => false,
    };
    Ok(StableReport {
        hypothesis,
        cond1,
        cond2,
        cond3_formula_valid,
        gi_matrix: if cond3_formula_valid { gi } else { None },
    })
}

/// Bounds on `‖Ā⁺‖` and `‖Ā⁺ − A⁺‖` for a stable perturbation.
///
/// The formula route projects `C = A⁺(I + dA A⁺)⁻¹` as
/// `P_{N(Ā)⊥} C P_{R(Ā)}`; the oracle is `pinv(Ā)`.
pub fn stable_bounds(a: &Matrix, da: &Matrix, tol: &ToleranceProfile) -> Result<BoundReport> {
    let stable = is_stable(a, da, tol)?;
    let a_bar = a.try_add(da)?;
    let a_pinv = pinv(a, tol)?;
    let a_bar_pinv = pinv(&a_bar, tol)?;
    let pn = op_norm(&a_pinv)?;
    let e = op_norm(da)?;

    let c = match &stable.gi_matrix {
        Some(c) => c.clone(),
        None => &a_pinv * &inverse(&(&Matrix::identity(a.rows()) + &(da * &a_pinv)), tol)?,
    };
    let p_row = Subspace::kernel_of(&a_bar, tol)?.orthogonal_complement()?.projector();
    let p_range = Subspace::range_of(&a_bar, tol)?.projector();
    let formula = &(&p_row * &c) * &p_range;
    let relerr = relative_error(&formula, &a_bar_pinv)?;

    let bar_norm = op_norm(&a_bar_pinv)?;
    let stable_flag = HypothesisStatus::new("lemma21.stable_perturbation", 1.0, if stable.cond1 { 0.0 } else { 1.0 });
    Ok(BoundReport {
        theorem: Theorem::Lemma21,
        formula_result: formula,
        oracle_result: Some(a_bar_pinv.clone()),
        formula_vs_oracle_relerr: Some(relerr),
        norm_bound: pn / (1.0 - pn * e),
        norm_actual: bar_norm,
        diff_bound: GOLDEN * bar_norm * pn * e,
        diff_actual: op_norm(&(&a_bar_pinv - &a_pinv))?,
        base_norm: pn,
        hypotheses: vec![stable.hypothesis, stable_flag],
        alt_form_residual: None,
        all_satisfied: false,
    }
    .finish())
}

#[derive(Clone, Debug, Serialize)]
pub struct GapPropagationReport {
    /// `δ̂(AT, AT′)`.
    pub actual: f64,
    /// `‖A‖‖G‖δ̂ / (1 − (1 + ‖A‖‖G‖)δ̂)` with `δ̂ = δ̂(T, T′)`.
    pub bound: f64,
    /// `δ(AT, AT′)`.
    pub directed_actual: f64,
    /// `‖A‖‖G‖ δ(T, T′)`.
    pub directed_bound: f64,
    pub gap_t: f64,
    pub base_norm: f64,
    pub hypothesis: HypothesisStatus,
}

impl GapPropagationReport {
    fn slack(&self) -> f64 {
        BOUND_ATOL
    }

    pub fn bound_holds(&self) -> bool {
        self.actual <= self.bound * (1.0 + BOUND_RTOL) + self.slack()
    }

    pub fn directed_holds(&self) -> bool {
        self.directed_actual <= self.directed_bound * (1.0 + BOUND_RTOL) + self.slack()
    }

    pub fn is_violation(&self) -> bool {
        self.hypothesis.clearly_satisfied() && !(self.bound_holds() && self.directed_holds())
    }
}

pub fn gap_propagation(
    problem: &OuterInverseProblem,
    t_prime: &Subspace,
    tol: &ToleranceProfile,
) -> Result<GapPropagationReport> {
    let base = Base::new(problem, tol)?;
    let kappa = base.a_norm * base.g_norm;
    let gap_t = gap_hat(problem.t(), t_prime)?;
    let at = problem.t().image_under(problem.a(), tol)?;
    let at_prime = t_prime.image_under(problem.a(), tol)?;
    let threshold = base.thresholds().gap_t(Theorem::Lemma31).unwrap();
    Ok(GapPropagationReport {
        actual: gap_hat(&at, &at_prime)?,
        bound: kappa * gap_t / (1.0 - (1.0 + kappa) * gap_t),
        directed_actual: delta(&at, &at_prime)?,
        directed_bound: kappa * delta(problem.t(), t_prime)?,
        gap_t,
        base_norm: base.g_norm,
        hypothesis: HypothesisStatus::new("lemma31.gap_T", threshold, gap_t),
    })
}

/// `T` replaced by `T′`.
pub fn perturb_t(problem: &OuterInverseProblem, t_prime: &Subspace, tol: &ToleranceProfile) -> Result<BoundReport> {
    let base = Base::new(problem, tol)?;
    let gap_t = gap_hat(problem.t(), t_prime)?;
    let threshold = base.thresholds().gap_t(Theorem::Prop31).unwrap();
    let formula = base.t_formula(t_prime, tol)?;
    let (oracle, relerr) = oracle_and_relerr(problem.with_t(t_prime.clone()), &formula, tol)?;
    let new_norm = op_norm(oracle.as_ref().unwrap_or(&formula))?;
    let (g, a) = (base.g_norm, base.a_norm);
    Ok(BoundReport {
        theorem: Theorem::Prop31,
        norm_actual: op_norm(&formula)?,
        diff_actual: op_norm(&(&formula - &base.g))?,
        formula_result: formula,
        oracle_result: oracle,
        formula_vs_oracle_relerr: relerr,
        norm_bound: g / (1.0 - g * a * gap_t),
        diff_bound: GOLDEN * new_norm * g * a * gap_t,
        base_norm: g,
        hypotheses: vec![HypothesisStatus::new("prop31.gap_T", threshold, gap_t)],
        alt_form_residual: None,
        all_satisfied: false,
    }
    .finish())
}

/// `S` replaced by `S′`.
pub fn perturb_s(problem: &OuterInverseProblem, s_prime: &Subspace, tol: &ToleranceProfile) -> Result<BoundReport> {
    let base = Base::new(problem, tol)?;
    let gap_s = gap_hat(problem.s(), s_prime)?;
    let threshold = base.thresholds().gap_s(Theorem::Prop32).unwrap();
    let formula = base.s_formula(s_prime, tol)?;
    let (oracle, relerr) = oracle_and_relerr(problem.with_s(s_prime.clone()), &formula, tol)?;
    let new_norm = op_norm(oracle.as_ref().unwrap_or(&formula))?;
    let (g, a) = (base.g_norm, base.a_norm);
    Ok(BoundReport {
        theorem: Theorem::Prop32,
        norm_actual: op_norm(&formula)?,
        diff_actual: op_norm(&(&formula - &base.g))?,
        formula_result: formula,
        oracle_result: oracle,
        formula_vs_oracle_relerr: relerr,
        norm_bound: g / (1.0 - g * a * gap_s),
        diff_bound: GOLDEN * new_norm * g * a * gap_s,
        base_norm: g,
        hypotheses: vec![HypothesisStatus::new("prop32.gap_S", threshold, gap_s)],
        alt_form_residual: None,
        all_satisfied: false,
    }
    .finish())
}

/// `T` and `S` replaced simultaneously.
pub fn perturb_ts(
    problem: &OuterInverseProblem,
    t_prime: &Subspace,
    s_prime: &Subspace,
    tol: &ToleranceProfile,
) -> Result<BoundReport> {
    let base = Base::new(problem, tol)?;
    let gap_t = gap_hat(problem.t(), t_prime)?;
    let gap_s = gap_hat(problem.s(), s_prime)?;
    let threshold = base.thresholds().gap_t(Theorem::Thm31).unwrap();
    let formula = base.ts_formula(t_prime, s_prime, tol)?;
    let perturbed = OuterInverseProblem::new(problem.a().clone(), t_prime.clone(), s_prime.clone());
    let (oracle, relerr) = oracle_and_relerr(perturbed, &formula, tol)?;
    let (g, a) = (base.g_norm, base.a_norm);
    let denom = 1.0 - g * a * (gap_t + gap_s);
    Ok(BoundReport {
        theorem: Theorem::Thm31,
        norm_actual: op_norm(&formula)?,
        diff_actual: op_norm(&(&formula - &base.g))?,
        formula_result: formula,
        oracle_result: oracle,
        formula_vs_oracle_relerr: relerr,
        norm_bound: g / denom,
        diff_bound: GOLDEN * g * g * a * (gap_t + gap_s) / denom,
        base_norm: g,
        hypotheses: vec![HypothesisStatus::new("thm31.max_gap", threshold, gap_t.max(gap_s))],
        alt_form_residual: None,
        all_satisfied: false,
    }
    .finish())
}

/// `A` replaced by `A + E` with `T`, `S` fixed.
pub fn perturb_a(problem: &OuterInverseProblem, e: &Matrix, tol: &ToleranceProfile) -> Result<BoundReport> {
    let base = Base::new(problem, tol)?;
    let norm_e = op_norm(e)?;
    let left = a_formula_left(&base.g, e, tol)?;
    let right = a_formula_right(&base.g, e, tol)?;
    let alt = op_norm(&(&left - &right))?;
    let (oracle, relerr) = oracle_and_relerr(problem.with_a(problem.a().try_add(e)?), &left, tol)?;
    let g = base.g_norm;
    let denom = 1.0 - g * norm_e;
    Ok(BoundReport {
        theorem: Theorem::Lemma32,
        norm_actual: op_norm(&left)?,
        diff_actual: op_norm(&(&left - &base.g))?,
        formula_result: left,
        oracle_result: oracle,
        formula_vs_oracle_relerr: relerr,
        norm_bound: g / denom,
        diff_bound: g * g * norm_e / denom,
        base_norm: g,
        hypotheses: vec![HypothesisStatus::new("lemma32.norm_G_times_norm_E", 1.0, g * norm_e)],
        alt_form_residual: Some(alt),
        all_satisfied: false,
    }
    .finish())
}

/// `T`, `S` and `A` perturbed together: `(I + G′E)⁻¹ G′` with `G′` the
/// nested `T`/`S` representation.
pub fn perturb_all(scenario: &PerturbationScenario, tol: &ToleranceProfile) -> Result<BoundReport> {
    let problem = scenario.base();
    let base = Base::new(problem, tol)?;
    let (gap_t, gap_s, norm_e) = (scenario.measured_gap_t, scenario.measured_gap_s, scenario.norm_e);
    let th = base.thresholds();
    let g_ts = base.ts_formula(&scenario.t_prime, &scenario.s_prime, tol)?;
    let formula = a_formula_left(&g_ts, &scenario.e, tol)?;
    let perturbed =
        OuterInverseProblem::new(problem.a().try_add(&scenario.e)?, scenario.t_prime.clone(), scenario.s_prime.clone());
    let (oracle, relerr) = oracle_and_relerr(perturbed, &formula, tol)?;
    let (g, a) = (base.g_norm, base.a_norm);
    let gaps = gap_t + gap_s;
    let denom = 1.0 - g * (norm_e + a * gaps);
    Ok(BoundReport {
        theorem: Theorem::Thm32,
        norm_actual: op_norm(&formula)?,
        diff_actual: op_norm(&(&formula - &base.g))?,
        formula_result: formula,
        oracle_result: oracle,
        formula_vs_oracle_relerr: relerr,
        norm_bound: g / denom,
        diff_bound: g * g * (norm_e + GOLDEN * a * gaps) / denom,
        base_norm: g,
        hypotheses: vec![
            HypothesisStatus::new("thm32.max_gap", th.gap_t(Theorem::Thm32).unwrap(), gap_t.max(gap_s)),
            HypothesisStatus::new("thm32.norm_G_times_norm_E", 1.0 / (1.0 + g * a), g * norm_e),
        ],
        alt_form_residual: None,
        all_satisfied: false,
    }
    .finish())
}

/// Thresholds of the theorems for a base problem (`‖A⁺‖` in place of `‖G‖`
/// for [`Theorem::Lemma21`]).
pub fn thresholds_for(problem: &OuterInverseProblem, theorem: Theorem, tol: &ToleranceProfile) -> Result<Thresholds> {
    let a_norm = op_norm(problem.a())?;
    let g_norm = if theorem == Theorem::Lemma21 {
        op_norm(&pinv(problem.a(), tol)?)?
    } else {
        op_norm(&compute(problem, tol)?.g)?
    };
    Ok(Thresholds { a_norm, g_norm })
}
