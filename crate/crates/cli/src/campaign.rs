use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use oil_core::instance_gen::{generate, trial_seed, GenConfig};
use oil_core::{Error as CoreError, Theorem, ToleranceProfile};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::evaluate::{evaluate, Evaluation};
use crate::CliError;

/// Largest acceptable formula-vs-oracle relative error in a passing campaign.
pub const RELERR_LIMIT: f64 = 1e-6;
/// Largest acceptable fraction of skipped trials per theorem.
pub const SKIP_LIMIT: f64 = 0.05;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    #[serde(default)]
    pub gen: GenConfig,
    #[serde(default = "all_theorems")]
    pub theorems: Vec<Theorem>,
    #[serde(default = "default_trials")]
    pub trials: u32,
    #[serde(default)]
    pub tolerances: ToleranceProfile,
    /// Relative paths are resolved against the working directory.
    #[serde(default = "default_output")]
    pub output_path: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
}

fn all_theorems() -> Vec<Theorem> {
    Theorem::ALL.to_vec()
}

fn default_trials() -> u32 {
    200
}

fn default_output() -> PathBuf {
    PathBuf::from("campaign.csv")
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            gen: GenConfig::default(),
            theorems: all_theorems(),
            trials: default_trials(),
            tolerances: ToleranceProfile::default(),
            output_path: default_output(),
            format: OutputFormat::default(),
        }
    }
}

impl CampaignConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: CampaignConfig = serde_json::from_str(text).map_err(CliError::Json)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.trials == 0 {
            return Err(CoreError::Config("trials must be at least 1".into()).into());
        }
        if self.theorems.is_empty() {
            return Err(CoreError::Config("theorem set is empty".into()).into());
        }
        self.tolerances.validate()?;
        self.gen.validate()?;
        Ok(())
    }

    /// Configured theorems, deduplicated, in canonical order.
    pub fn theorem_set(&self) -> Vec<Theorem> {
        self.theorems.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
    }

    /// SHA-256 of the canonical JSON form of the configuration.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&canonical))
    }
}

/// Reproduction metadata embedded in every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportHeader {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub rng: String,
    pub tolerances: ToleranceProfile,
}

impl ReportHeader {
    pub fn new(command: &str, config: &CampaignConfig) -> Self {
        ReportHeader {
            tool: "oil".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config_hash: config.hash(),
            seed: config.gen.seed,
            rng: oil_core::instance_gen::RNG_ID.into(),
            tolerances: config.tolerances,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FailureKind {
    /// The generator exhausted its retries.
    Skipped,
    /// Generation or evaluation failed for another reason.
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial_id: u32,
    pub theorem: Theorem,
    pub kind: FailureKind,
    pub message: String,
}

pub type TrialOutcome = Result<Evaluation, TrialFailure>;

/// Seed of trial `trial_id` for `theorem`. Each theorem uses its own stream so
/// adding or removing theorems leaves the other rows unchanged.
pub fn seed_for(seed: u64, theorem: Theorem, trial_id: u32) -> u64 {
    let stream = Theorem::ALL.iter().position(|t| *t == theorem).expect("known theorem") as u32;
    trial_seed(seed, stream, trial_id)
}

pub fn run_trial(gen: &GenConfig, theorem: Theorem, trial_id: u32, tol: &ToleranceProfile) -> TrialOutcome {
    let cfg = GenConfig { seed: seed_for(gen.seed, theorem, trial_id), ..gen.clone() };
    let fail = |kind, e: CoreError| TrialFailure { trial_id, theorem, kind, message: e.to_string() };
    let inst = generate(&cfg, theorem, tol).map_err(|e| match e {
        CoreError::RetriesExhausted { .. } => fail(FailureKind::Skipped, e),
        e => fail(FailureKind::Error, e),
    })?;
    evaluate(theorem, &inst.scenario, trial_id, tol).map_err(|e| fail(FailureKind::Error, e))
}

/// All trials of one theorem, in parallel on the current thread pool,
/// returned in trial order.
pub fn run_theorem(gen: &GenConfig, theorem: Theorem, trials: u32, tol: &ToleranceProfile) -> Vec<TrialOutcome> {
    (0..trials).into_par_iter().map(|i| run_trial(gen, theorem, i, tol)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremSummary {
    pub theorem: Theorem,
    pub trials_run: u32,
    pub skipped: u32,
    pub errors: u32,
    pub hypotheses_met_count: u32,
    pub bounds_violations: u32,
    /// Over trials whose hypotheses held; `null` if there were none.
    pub max_relerr: Option<f64>,
    pub worst_margin_norm: Option<f64>,
    pub worst_margin_diff: Option<f64>,
    /// Worst zero-perturbation reduction error, when such trials ran.
    pub max_reduction_error: Option<f64>,
}

fn fmax(acc: Option<f64>, x: f64) -> Option<f64> {
    Some(match acc {
        Some(a) if !x.is_nan() && x <= a => a,
        _ => x,
    })
}

fn fmin(acc: Option<f64>, x: f64) -> Option<f64> {
    Some(match acc {
        Some(a) if !x.is_nan() && x >= a => a,
        _ => x,
    })
}

impl TheoremSummary {
    pub fn new(theorem: Theorem) -> Self {
        TheoremSummary {
            theorem,
            trials_run: 0,
            skipped: 0,
            errors: 0,
            hypotheses_met_count: 0,
            bounds_violations: 0,
            max_relerr: None,
            worst_margin_norm: None,
            worst_margin_diff: None,
            max_reduction_error: None,
        }
    }

    pub fn add(&mut self, outcome: &TrialOutcome) {
        match outcome {
            Ok(ev) => {
                self.trials_run += 1;
                if ev.violation {
                    self.bounds_violations += 1;
                }
                if let Some(r) = ev.reduction_error {
                    self.max_reduction_error = fmax(self.max_reduction_error, r);
                }
                if ev.row.hyp_ok {
                    self.hypotheses_met_count += 1;
                    // A missing oracle on a hypothesis-satisfying trial counts as unbounded error.
                    self.max_relerr = fmax(self.max_relerr, ev.row.relerr.unwrap_or(f64::INFINITY));
                    self.worst_margin_norm = fmin(self.worst_margin_norm, ev.row.margin_norm);
                    self.worst_margin_diff = fmin(self.worst_margin_diff, ev.row.margin_diff);
                }
            }
            Err(f) if f.kind == FailureKind::Skipped => self.skipped += 1,
            Err(_) => self.errors += 1,
        }
    }

    pub fn relerr_ok(&self) -> bool {
        self.max_relerr.is_none_or(|r| r <= RELERR_LIMIT)
    }

    pub fn skips_ok(&self) -> bool {
        let attempted = self.trials_run + self.skipped + self.errors;
        attempted == 0 || (self.skipped as f64) <= SKIP_LIMIT * attempted as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    OperationalError,
    BoundViolation,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::OperationalError => 1,
            Verdict::BoundViolation => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub per_theorem: Vec<TheoremSummary>,
    pub wall_time_s: f64,
}

impl CampaignSummary {
    pub fn bounds_violations(&self) -> u32 {
        self.per_theorem.iter().map(|s| s.bounds_violations).sum()
    }

    pub fn verdict(&self) -> Verdict {
        if self.bounds_violations() > 0 {
            Verdict::BoundViolation
        } else if self.per_theorem.iter().all(|s| s.errors == 0 && s.relerr_ok() && s.skips_ok()) {
            Verdict::Pass
        } else {
            Verdict::OperationalError
        }
    }
}

#[derive(Clone, Debug)]
pub struct CampaignOutcome {
    pub header: ReportHeader,
    pub outcomes: Vec<TrialOutcome>,
    pub summary: CampaignSummary,
}

impl CampaignOutcome {
    pub fn evaluations(&self) -> impl Iterator<Item = &Evaluation> {
        self.outcomes.iter().filter_map(|o| o.as_ref().ok())
    }

    pub fn failures(&self) -> impl Iterator<Item = &TrialFailure> {
        self.outcomes.iter().filter_map(|o| o.as_ref().err())
    }
}

/// Runs `f` on a pool of `jobs` threads, or on the global pool.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Other(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Every configured theorem for `config.trials` trials. Rows come out in
/// theorem order, then trial order, independent of scheduling.
pub fn run_campaign(config: &CampaignConfig) -> CampaignOutcome {
    let start = Instant::now();
    let mut outcomes = Vec::new();
    let mut per_theorem = Vec::new();
    for theorem in config.theorem_set() {
        let results = run_theorem(&config.gen, theorem, config.trials, &config.tolerances);
        let mut summary = TheoremSummary::new(theorem);
        results.iter().for_each(|o| summary.add(o));
        per_theorem.push(summary);
        outcomes.extend(results);
    }
    CampaignOutcome {
        header: ReportHeader::new("verify", config),
        outcomes,
        summary: CampaignSummary { per_theorem, wall_time_s: start.elapsed().as_secs_f64() },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluate::TrialRow;

    fn evaluation(theorem: Theorem, violation: bool, relerr: f64) -> TrialOutcome {
        Ok(Evaluation {
            row: TrialRow {
                trial_id: 0,
                theorem,
                gap_t: 0.1,
                gap_s: 0.0,
                norm_e: 0.0,
                hyp_ok: true,
                relerr: Some(relerr),
                norm_bound: 1.0,
                norm_actual: 0.5,
                diff_bound: 1.0,
                diff_actual: if violation { 2.0 } else { 0.5 },
                margin_norm: 0.5,
                margin_diff: if violation { -1.0 } else { 0.5 },
            },
            violation,
            reduction_error: None,
        })
    }

    fn skipped(theorem: Theorem) -> TrialOutcome {
        Err(TrialFailure { trial_id: 0, theorem, kind: FailureKind::Skipped, message: String::new() })
    }

    fn summary(outcomes: &[TrialOutcome]) -> CampaignSummary {
        let mut s = TheoremSummary::new(Theorem::Prop31);
        outcomes.iter().for_each(|o| s.add(o));
        CampaignSummary { per_theorem: vec![s], wall_time_s: 0.0 }
    }

    #[test]
    fn verdicts() {
        let ok = evaluation(Theorem::Prop31, false, 1e-12);
        assert_eq!(summary(std::slice::from_ref(&ok)).verdict(), Verdict::Pass);
        assert_eq!(
            summary(&[ok.clone(), evaluation(Theorem::Prop31, false, 1e-3)]).verdict(),
            Verdict::OperationalError
        );
        // A violation outranks everything else.
        let bad = [evaluation(Theorem::Prop31, true, 1e-3), skipped(Theorem::Prop31)];
        assert_eq!(summary(&bad).verdict(), Verdict::BoundViolation);
        assert_eq!(Verdict::BoundViolation.exit_code(), 3);

        let mut many: Vec<_> = (0..19).map(|_| ok.clone()).collect();
        many.push(skipped(Theorem::Prop31));
        assert_eq!(summary(&many).verdict(), Verdict::Pass);
        many.push(skipped(Theorem::Prop31));
        assert_eq!(summary(&many).verdict(), Verdict::OperationalError);
    }

    #[test]
    fn config_defaults_and_hash() {
        let cfg = CampaignConfig::from_json("{}").unwrap();
        assert_eq!(cfg, CampaignConfig::default());
        assert_eq!(cfg.theorem_set().len(), 7);
        let other = CampaignConfig::from_json(r#"{"gen": {"seed": 1}}"#).unwrap();
        assert_ne!(cfg.hash(), other.hash());
        assert_eq!(cfg.hash().len(), 64);
        assert!(CampaignConfig::from_json(r#"{"trials": 0}"#).is_err());
        assert!(CampaignConfig::from_json(r#"{"format": "xml"}"#).is_err());
    }

    #[test]
    fn theorem_streams_are_independent() {
        let gen = GenConfig { seed: 4, ..GenConfig::default() };
        let tol = ToleranceProfile::default();
        let alone =
            CampaignConfig { gen: gen.clone(), theorems: vec![Theorem::Thm31], trials: 3, ..CampaignConfig::default() };
        let with_others = CampaignConfig { theorems: vec![Theorem::Prop31, Theorem::Thm31], ..alone.clone() };
        let rows = |c: &CampaignConfig| -> Vec<_> {
            run_campaign(c).evaluations().filter(|e| e.row.theorem == Theorem::Thm31).map(|e| e.row.clone()).collect()
        };
        assert_eq!(rows(&alone), rows(&with_others));
        assert!(run_trial(&gen, Theorem::Thm31, 0, &tol).is_ok());
    }
}
