use serde::{Deserialize, Serialize};

use super::FilterError;

/// Parameters shared by the three filters. Each filter reads the fields it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    /// Tap count of the output section. GAL uses `order - 1` lattice stages.
    pub order: usize,
    /// Forgetting factor λ in (0, 1] (RLS, FTF).
    pub forgetting_factor: f64,
    /// Initial regularization δ > 0; `P(0) = δ⁻¹ I` (RLS, FTF).
    pub init_delta: f64,
    /// Reflection-coefficient step μ̂ (GAL).
    pub step_size: f64,
    /// Ladder step μ̃ (GAL).
    pub ladder_step: f64,
    /// Energy smoothing β in (0, 1) (GAL).
    pub smoothing: f64,
    /// Lower bound on every GAL normalizer.
    pub floor: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            order: 16,
            forgetting_factor: 0.995,
            init_delta: 0.01,
            step_size: 0.05,
            ladder_step: 0.05,
            smoothing: 0.9,
            floor: 1e-6,
        }
    }
}

fn positive(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

impl FilterConfig {
    pub fn validate(&self) -> Result<(), FilterError> {
        let bad = |msg: String| Err(FilterError::InvalidConfig(msg));
        if self.order == 0 {
            return bad("order must be at least 1".into());
        }
        let lambda = self.forgetting_factor;
        if !(lambda > 0.0 && lambda <= 1.0) {
            return bad(format!("forgetting factor {lambda} outside (0, 1]"));
        }
        if !positive(self.init_delta) {
            return bad(format!("init delta {} must be positive", self.init_delta));
        }
        if !positive(self.step_size) {
            return bad(format!("step size {} must be positive", self.step_size));
        }
        if !positive(self.ladder_step) {
            return bad(format!("ladder step {} must be positive", self.ladder_step));
        }
        let beta = self.smoothing;
        if !(beta > 0.0 && beta < 1.0) {
            return bad(format!("smoothing {beta} outside (0, 1)"));
        }
        if !positive(self.floor) {
            return bad(format!("floor {} must be positive", self.floor));
        }
        Ok(())
    }
}
