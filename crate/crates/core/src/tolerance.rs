//! Shared numerical tolerances and truncation budgets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable that overrides the default `eps`.
pub const EPS_ENV: &str = "FRACSEQ_EPS";

/// Tolerances used by every convergence and membership diagnostic.
///
/// A single instance is threaded through all analyses so that verdicts in
/// different modules are produced under the same thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Absolute tolerance for "converged" and "equals zero" decisions.
    pub eps: f64,
    /// Number of consecutive terms inspected by window-based tests.
    pub window: usize,
    /// Largest row count for exhaustive subset enumeration.
    pub subset_budget: usize,
    /// Number of rows of an infinite matrix that are evaluated.
    pub rows: usize,
    /// Number of columns (and tail terms) evaluated per row.
    pub cols: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            eps: 1e-8,
            window: 16,
            subset_budget: 20,
            rows: 256,
            cols: 256,
        }
    }
}

impl ToleranceConfig {
    /// Defaults with `eps` taken from `FRACSEQ_EPS` when it is set.
    pub fn from_env() -> Result<Self> {
        let mut tol = ToleranceConfig::default();
        if let Ok(raw) = std::env::var(EPS_ENV) {
            tol.eps = raw.trim().parse().map_err(|_| Error::Parse {
                location: EPS_ENV.to_string(),
                message: format!("not a number: {raw:?}"),
            })?;
        }
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(Error::usage(format!("eps must be positive, got {}", self.eps)));
        }
        if self.window < 2 {
            return Err(Error::usage("window must be at least 2"));
        }
        if self.subset_budget > 24 {
            return Err(Error::usage(format!(
                "subset budget {} exceeds the maximum of 24",
                self.subset_budget
            )));
        }
        if self.rows < 2 * self.window || self.cols < 2 * self.window {
            return Err(Error::usage(format!(
                "truncation {}x{} must be at least twice the window {}",
                self.rows, self.cols, self.window
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ToleranceConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_oversized_budget_and_short_truncation() {
        let tol = ToleranceConfig { subset_budget: 25, ..Default::default() };
        assert!(tol.validate().is_err());
        let tol = ToleranceConfig { rows: 20, ..Default::default() };
        assert!(tol.validate().is_err());
    }
}
