use serde::{Deserialize, Serialize};

/// Relative band below a threshold inside which a strict inequality is
/// considered numerically undecidable.
pub const GUARD_BAND: f64 = 1e-10;

/// One strict-inequality hypothesis `observed < threshold`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisStatus {
    pub name: String,
    pub threshold: f64,
    pub observed: f64,
    pub satisfied: bool,
}

impl HypothesisStatus {
    pub fn new(name: impl Into<String>, threshold: f64, observed: f64) -> Self {
        HypothesisStatus { name: name.into(), threshold, observed, satisfied: observed < threshold }
    }

    /// True when `observed` sits within [`GUARD_BAND`] (relative) of the
    /// threshold on either side.
    pub fn ambiguous(&self) -> bool {
        (self.observed - self.threshold).abs() <= GUARD_BAND * self.threshold.abs()
    }

    /// Satisfied with room to spare beyond the guard band.
    pub fn clearly_satisfied(&self) -> bool {
        self.satisfied && !self.ambiguous()
    }
}
