use oil_core::perturbation::{
    gap_propagation, margin, perturb_a, perturb_all, perturb_s, perturb_t, perturb_ts, stable_bounds, BOUND_ATOL,
};
use oil_core::{PerturbationScenario, Result, Theorem, ToleranceProfile};
use serde::{Deserialize, Serialize};

/// One row of a campaign table. Column order is part of the output contract.
///
/// For `lemma31` (which bounds a subspace gap rather than an inverse) the
/// `norm_*` columns carry the directed inequality `δ(AT,AT′) ≤ ‖A‖‖G‖δ(T,T′)`,
/// the `diff_*` columns carry the gap bound on `δ̂(AT,AT′)`, and `relerr` is 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial_id: u32,
    pub theorem: Theorem,
    #[serde(rename = "gap_T")]
    pub gap_t: f64,
    #[serde(rename = "gap_S")]
    pub gap_s: f64,
    #[serde(rename = "norm_E")]
    pub norm_e: f64,
    pub hyp_ok: bool,
    /// Formula against oracle; empty when the oracle was not evaluable.
    pub relerr: Option<f64>,
    pub norm_bound: f64,
    pub norm_actual: f64,
    pub diff_bound: f64,
    pub diff_actual: f64,
    pub margin_norm: f64,
    pub margin_diff: f64,
}

pub const CSV_COLUMNS: [&str; 13] = [
    "trial_id",
    "theorem",
    "gap_T",
    "gap_S",
    "norm_E",
    "hyp_ok",
    "relerr",
    "norm_bound",
    "norm_actual",
    "diff_bound",
    "diff_actual",
    "margin_norm",
    "margin_diff",
];

/// Result of checking one theorem on one scenario.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub row: TrialRow,
    /// A bound failed while every hypothesis held.
    pub violation: bool,
    /// Relative error of the zero-perturbation reduction, for unperturbed
    /// scenarios: `‖formula − G‖ / ‖G‖`.
    pub reduction_error: Option<f64>,
}

/// Runs the operation matching `theorem` on `scenario`.
pub fn evaluate(
    theorem: Theorem,
    scenario: &PerturbationScenario,
    trial_id: u32,
    tol: &ToleranceProfile,
) -> Result<Evaluation> {
    let problem = scenario.base();
    let (gap_t, gap_s, norm_e) = (scenario.measured_gap_t(), scenario.measured_gap_s(), scenario.norm_e());

    if theorem == Theorem::Lemma31 {
        let rep = gap_propagation(problem, scenario.t_prime(), tol)?;
        return Ok(Evaluation {
            violation: rep.is_violation(),
            reduction_error: None,
            row: TrialRow {
                trial_id,
                theorem,
                gap_t,
                gap_s,
                norm_e,
                hyp_ok: rep.hypothesis.clearly_satisfied(),
                relerr: Some(0.0),
                norm_bound: rep.directed_bound,
                norm_actual: rep.directed_actual,
                diff_bound: rep.bound,
                diff_actual: rep.actual,
                margin_norm: margin(rep.directed_bound, rep.directed_actual, BOUND_ATOL),
                margin_diff: margin(rep.bound, rep.actual, BOUND_ATOL),
            },
        });
    }

    let rep = match theorem {
        Theorem::Lemma21 => stable_bounds(problem.a(), scenario.e(), tol)?,
        Theorem::Prop31 => perturb_t(problem, scenario.t_prime(), tol)?,
        Theorem::Prop32 => perturb_s(problem, scenario.s_prime(), tol)?,
        Theorem::Thm31 => perturb_ts(problem, scenario.t_prime(), scenario.s_prime(), tol)?,
        Theorem::Lemma32 => perturb_a(problem, scenario.e(), tol)?,
        Theorem::Thm32 => perturb_all(scenario, tol)?,
        Theorem::Lemma31 => unreachable!(),
    };
    let reduction_error = if gap_t == 0.0 && gap_s == 0.0 && norm_e == 0.0 {
        let base = if theorem == Theorem::Lemma21 {
            oil_core::numlin::pinv(problem.a(), tol)?
        } else {
            oil_core::outer_inverse::compute(problem, tol)?.g
        };
        Some(oil_core::numlin::relative_error(&rep.formula_result, &base)?)
    } else {
        None
    };
    Ok(Evaluation {
        violation: rep.is_violation(),
        reduction_error,
        row: TrialRow {
            trial_id,
            theorem,
            gap_t,
            gap_s,
            norm_e,
            hyp_ok: rep.hypotheses_met(),
            relerr: rep.formula_vs_oracle_relerr,
            norm_bound: rep.norm_bound,
            norm_actual: rep.norm_actual,
            diff_bound: rep.diff_bound,
            diff_actual: rep.diff_actual,
            margin_norm: rep.margin_norm(),
            margin_diff: rep.margin_diff(),
        },
    })
}
