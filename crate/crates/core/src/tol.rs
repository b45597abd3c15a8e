//! Shared tolerance policy.
//!
//! Every positivity decision, rank cut and matrix identity check in this
//! crate routes through one instance of [`TolerancePolicy`]; no module
//! carries a private cutoff.

use serde::{Deserialize, Serialize};

/// Tolerances used across the whole toolkit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    /// Relative eigenvalue floor for positivity tests.
    pub eps_psd: f64,
    /// Relative equality tolerance for matrix identities.
    pub eps_eq: f64,
    /// Singular-value floor for rank decisions.
    pub eps_rank: f64,
    /// Relative error target for quadrature oracles.
    pub quad_rel_err: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy {
            eps_psd: 1e-9,
            eps_eq: 1e-9,
            eps_rank: 1e-10,
            quad_rel_err: 1e-10,
        }
    }
}

impl TolerancePolicy {
    /// Tighter profile, selected with `QWL_TOLERANCE_PROFILE=strict`.
    pub fn strict() -> Self {
        TolerancePolicy {
            eps_psd: 1e-10,
            eps_eq: 1e-10,
            eps_rank: 1e-11,
            quad_rel_err: 1e-11,
        }
    }

    /// All fields must be strictly positive.
    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [
            ("eps_psd", self.eps_psd),
            ("eps_eq", self.eps_eq),
            ("eps_rank", self.eps_rank),
            ("quad_rel_err", self.quad_rel_err),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(format!("tolerance {name} must be strictly positive, got {v}"));
            }
        }
        Ok(())
    }
}
