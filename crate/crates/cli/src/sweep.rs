use std::fmt;
use std::time::Instant;

use oil_core::{Error as CoreError, Theorem};
use serde::{Deserialize, Serialize};

use crate::campaign::{run_theorem, CampaignConfig, ReportHeader, TheoremSummary, TrialFailure};
use crate::CliError;

/// Smallest nonzero ratio of a sweep grid, relative to the largest.
const GRID_SPAN: f64 = 1e-3;
/// Sweeps stop short of the hypothesis threshold by this factor.
pub const SWEEP_CAP: f64 = 0.95;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum SweepAxis {
    #[serde(rename = "gap_T")]
    #[value(name = "gap_T")]
    GapT,
    #[serde(rename = "gap_S")]
    #[value(name = "gap_S")]
    GapS,
    #[serde(rename = "norm_E")]
    #[value(name = "norm_E")]
    NormE,
}

impl SweepAxis {
    pub fn applies_to(self, theorem: Theorem) -> bool {
        match self {
            SweepAxis::GapT => theorem.perturbs_t(),
            SweepAxis::GapS => theorem.perturbs_s(),
            SweepAxis::NormE => theorem.perturbs_a(),
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::GapT => "gap_T",
            SweepAxis::GapS => "gap_S",
            SweepAxis::NormE => "norm_E",
        })
    }
}

/// `0` followed by `points - 1` log-spaced ratios ending at [`SWEEP_CAP`].
pub fn sweep_grid(points: usize) -> Vec<f64> {
    assert!(points >= 2);
    let k = points - 1;
    let mut grid = vec![0.0];
    grid.extend((0..k).map(|i| {
        if k == 1 {
            SWEEP_CAP
        } else {
            SWEEP_CAP * GRID_SPAN.powf(1.0 - i as f64 / (k - 1) as f64)
        }
    }));
    grid
}

pub const SWEEP_COLUMNS: [&str; 16] = [
    "point",
    "ratio",
    "axis_mean",
    "trials_run",
    "skipped",
    "mean_norm_actual",
    "max_norm_actual",
    "mean_norm_bound",
    "max_norm_bound",
    "mean_diff_actual",
    "max_diff_actual",
    "mean_diff_bound",
    "max_diff_bound",
    "max_relerr",
    "violations",
    "hyp_ok_count",
];

/// Aggregates over the trials at one grid point. Means are taken over
/// trials that ran; they are NaN when none did.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub point: u32,
    /// Fraction of the hypothesis threshold.
    pub ratio: f64,
    /// Mean achieved value along the swept axis.
    pub axis_mean: f64,
    pub trials_run: u32,
    pub skipped: u32,
    pub mean_norm_actual: f64,
    pub max_norm_actual: f64,
    pub mean_norm_bound: f64,
    pub max_norm_bound: f64,
    pub mean_diff_actual: f64,
    pub max_diff_actual: f64,
    pub mean_diff_bound: f64,
    pub max_diff_bound: f64,
    pub max_relerr: Option<f64>,
    pub violations: u32,
    pub hyp_ok_count: u32,
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub header: ReportHeader,
    pub theorem: Theorem,
    pub axis: SweepAxis,
    pub rows: Vec<SweepRow>,
    pub failures: Vec<TrialFailure>,
    /// Accumulated over every trial of every grid point.
    pub summary: TheoremSummary,
    pub wall_time_s: f64,
}

/// The configured theorem to sweep: `requested`, or else the first one the
/// axis applies to.
pub fn pick_theorem(config: &CampaignConfig, axis: SweepAxis, requested: Option<Theorem>) -> Result<Theorem, CliError> {
    let theorem = match requested {
        Some(t) => t,
        None => config
            .theorem_set()
            .into_iter()
            .find(|t| axis.applies_to(*t))
            .ok_or_else(|| CoreError::Config(format!("no configured theorem perturbs along {axis}")))?,
    };
    if !axis.applies_to(theorem) {
        return Err(CoreError::Config(format!("{theorem} does not perturb along {axis}")).into());
    }
    Ok(theorem)
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        f64::NAN
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

fn max(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::NAN, f64::max)
}

/// Varies one ratio over [`sweep_grid`] holding the others at their
/// configured values. Every grid point reuses the same per-trial seeds.
pub fn run_sweep(
    config: &CampaignConfig,
    theorem: Theorem,
    axis: SweepAxis,
    points: usize,
) -> Result<SweepOutcome, CliError> {
    if points < 2 {
        return Err(CoreError::Config("a sweep needs at least 2 points".into()).into());
    }
    let start = Instant::now();
    let mut summary = TheoremSummary::new(theorem);
    let mut rows = Vec::with_capacity(points);
    let mut failures = Vec::new();
    for (point, ratio) in sweep_grid(points).into_iter().enumerate() {
        let mut gen = config.gen.clone();
        match axis {
            SweepAxis::GapT => gen.target_gap_t = ratio,
            SweepAxis::GapS => gen.target_gap_s = ratio,
            SweepAxis::NormE => gen.target_norm_e_ratio = ratio,
        }
        let outcomes = run_theorem(&gen, theorem, config.trials, &config.tolerances);
        outcomes.iter().for_each(|o| summary.add(o));

        let evs: Vec<_> = outcomes.iter().filter_map(|o| o.as_ref().ok()).collect();
        let col = |f: &dyn Fn(&crate::evaluate::TrialRow) -> f64| evs.iter().map(|e| f(&e.row)).collect::<Vec<_>>();
        let axis_vals = col(&|r| match axis {
            SweepAxis::GapT => r.gap_t,
            SweepAxis::GapS => r.gap_s,
            SweepAxis::NormE => r.norm_e,
        });
        let (na, nb) = (col(&|r| r.norm_actual), col(&|r| r.norm_bound));
        let (da, db) = (col(&|r| r.diff_actual), col(&|r| r.diff_bound));
        let relerrs: Vec<f64> =
            evs.iter().filter(|e| e.row.hyp_ok).map(|e| e.row.relerr.unwrap_or(f64::INFINITY)).collect();
        failures.extend(outcomes.iter().filter_map(|o| o.as_ref().err().cloned()));
        rows.push(SweepRow {
            point: point as u32,
            ratio,
            axis_mean: mean(&axis_vals),
            trials_run: evs.len() as u32,
            skipped: (outcomes.len() - evs.len()) as u32,
            mean_norm_actual: mean(&na),
            max_norm_actual: max(&na),
            mean_norm_bound: mean(&nb),
            max_norm_bound: max(&nb),
            mean_diff_actual: mean(&da),
            max_diff_actual: max(&da),
            mean_diff_bound: mean(&db),
            max_diff_bound: max(&db),
            max_relerr: if relerrs.is_empty() { None } else { Some(max(&relerrs)) },
            violations: evs.iter().filter(|e| e.violation).count() as u32,
            hyp_ok_count: evs.iter().filter(|e| e.row.hyp_ok).count() as u32,
        });
    }
    Ok(SweepOutcome {
        header: ReportHeader::new("sweep", config),
        theorem,
        axis,
        rows,
        failures,
        summary,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}
