//! Tolerance configuration shared by every numerical check.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Base tolerances for positivity and equality checks.
///
/// `eps_psd` is the base slack for positive-semidefiniteness: a Hermitian
/// matrix of dimension `n` and norm `s` passes when its smallest eigenvalue is
/// at least `-eps_psd * n * max(s, 1)`. `eps_eq` is the base slack for
/// equality residuals, scaled by the norm of the quantity compared (with a
/// floor of 1 so that comparisons against zero stay meaningful).
///
/// Both must be strictly positive and at most `1e-4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub eps_psd: f64,
    pub eps_eq: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { eps_psd: 1e-9, eps_eq: 1e-10 }
    }
}

impl Tolerance {
    pub fn new(eps_psd: f64, eps_eq: f64) -> Result<Self> {
        let t = Tolerance { eps_psd, eps_eq };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("eps_psd", self.eps_psd), ("eps_eq", self.eps_eq)] {
            if !(v > 0.0) || !(v <= 1e-4) || !v.is_finite() {
                return Err(Error::InvalidTolerance(format!(
                    "{name} = {v:e} must satisfy 0 < {name} <= 1e-4"
                )));
            }
        }
        Ok(())
    }

    /// Effective eigenvalue floor for a PSD check on a Hermitian matrix of
    /// dimension `dim` with norm `norm`.
    pub fn psd_floor(&self, dim: usize, norm: f64) -> f64 {
        self.eps_psd * dim as f64 * norm.max(1.0)
    }

    /// Effective residual bound for an equality check between quantities of
    /// magnitude `scale`.
    pub fn eq_slack(&self, scale: f64) -> f64 {
        self.eps_eq * scale.max(1.0)
    }
}
