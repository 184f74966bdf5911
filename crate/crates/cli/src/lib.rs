//! Library side of the `oil` command: campaign configuration, trial
//! evaluation, sweeps and report writers.

use std::path::{Path, PathBuf};

use oil_core::outer_inverse::{compute, OuterInverseResult};
use oil_core::{OuterInverseProblem, ToleranceProfile};
use thiserror::Error;

pub mod campaign;
pub mod evaluate;
pub mod report;
pub mod sweep;

pub use campaign::{run_campaign, CampaignConfig, CampaignOutcome, CampaignSummary, OutputFormat, Verdict};
pub use evaluate::{evaluate, TrialRow};
pub use sweep::{run_sweep, SweepAxis, SweepRow};

/// Environment variable overriding the configured seed.
pub const SEED_ENV: &str = "OIL_SEED";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("malformed JSON: {0}")]
    Json(serde_json::Error),

    #[error(transparent)]
    Core(#[from] oil_core::Error),

    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    /// 2 for inputs whose outer inverse does not exist, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(oil_core::Error::NotExists(_)) => 2,
            _ => 1,
        }
    }
}

/// Applies `OIL_SEED` (if set) to `config`.
pub fn apply_seed_override(config: &mut CampaignConfig, value: Option<&str>) -> Result<(), CliError> {
    if let Some(v) = value {
        config.gen.seed = v
            .trim()
            .parse()
            .map_err(|_| CliError::Other(format!("{SEED_ENV}={v:?} is not an unsigned 64-bit integer")))?;
    }
    Ok(())
}

pub fn load_problem(path: &Path) -> Result<OuterInverseProblem, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(CliError::Json)
}

/// Computes and checks the outer inverse of a problem file.
pub fn compute_problem(problem: &OuterInverseProblem, tol: &ToleranceProfile) -> Result<OuterInverseResult, CliError> {
    tol.validate()?;
    let result = compute(problem, tol)?;
    if !result.satisfies_definition(tol)? {
        return Err(CliError::Other(format!(
            "computed inverse misses its defining equations: |GAG - G| = {:.3e}, range gap {:.3e}, null-space gap {:.3e}",
            result.residuals.gag, result.residuals.range_gap, result.residuals.null_gap
        )));
    }
    Ok(result)
}
