use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical thresholds shared by every rank decision and identity check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceProfile {
    /// Relative singular-value cutoff. `None` means `max(rows, cols) * eps`
    /// of the matrix being truncated.
    #[serde(default)]
    pub rank_rtol: Option<f64>,
    #[serde(default = "default_verify_atol")]
    pub verify_atol: f64,
    #[serde(default = "default_cond_cap")]
    pub cond_cap: f64,
}

fn default_verify_atol() -> f64 {
    1e-8
}

fn default_cond_cap() -> f64 {
    1e12
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        ToleranceProfile { rank_rtol: None, verify_atol: default_verify_atol(), cond_cap: default_cond_cap() }
    }
}

impl ToleranceProfile {
    pub fn validate(&self) -> Result<()> {
        if let Some(r) = self.rank_rtol {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::InvalidTolerance(format!("rank_rtol must lie in (0, 1), got {r}")));
            }
        }
        if !(self.verify_atol > 0.0 && self.verify_atol.is_finite()) {
            return Err(Error::InvalidTolerance(format!("verify_atol must be positive, got {}", self.verify_atol)));
        }
        if self.cond_cap.is_nan() || self.cond_cap <= 0.0 {
            return Err(Error::InvalidTolerance(format!("cond_cap must be positive, got {}", self.cond_cap)));
        }
        Ok(())
    }

    /// Relative cutoff applied to a `rows x cols` matrix.
    pub fn rank_rtol_for(&self, rows: usize, cols: usize) -> f64 {
        self.rank_rtol.unwrap_or_else(|| rows.max(cols).max(1) as f64 * f64::EPSILON)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let t = ToleranceProfile::default();
        t.validate().unwrap();
        assert_eq!(t.rank_rtol_for(3, 7), 7.0 * f64::EPSILON);
        assert_eq!(t.verify_atol, 1e-8);
        assert_eq!(t.cond_cap, 1e12);
    }

    #[test]
    fn rejects_bad_values() {
        let mut t = ToleranceProfile { rank_rtol: Some(1.0), ..Default::default() };
        assert!(t.validate().is_err());
        t.rank_rtol = Some(1e-10);
        t.verify_atol = 0.0;
        assert!(t.validate().is_err());
        t.verify_atol = 1e-9;
        t.cond_cap = -1.0;
        assert!(t.validate().is_err());
    }

    #[test]
    fn partial_json_fills_defaults() {
        let t: ToleranceProfile = serde_json::from_str(r#"{"verify_atol":1e-6}"#).unwrap();
        assert_eq!(t.rank_rtol, None);
        assert_eq!(t.cond_cap, 1e12);
    }
}
