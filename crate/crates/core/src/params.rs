//! Physical and integrator parameters.
//!
//! Natural units default to ħ = e = μ = 1. The Hall conductivity σ_H is
//! dimensionless and doubles as the Chern-Simons level.

use crate::error::{Error, Result};

/// Coupling constants shared by every operation that needs them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Physics {
    /// Hall conductivity, also the normalization of the Chern-Simons term.
    pub sigma_h: f64,
    pub hbar: f64,
    /// Carrier charge.
    pub e: f64,
    /// Carrier mass.
    pub mu: f64,
}

impl Default for Physics {
    fn default() -> Self {
        Self {
            sigma_h: 1.0,
            hbar: 1.0,
            e: 1.0,
            mu: 1.0,
        }
    }
}

impl Physics {
    pub fn with_sigma(sigma_h: f64) -> Self {
        Self {
            sigma_h,
            ..Self::default()
        }
    }

    /// Checks the scales (ħ, e, μ) are positive and finite. σ_H is checked
    /// separately since the quantization tools accept σ_H = 0.
    pub fn validate_scales(&self) -> Result<()> {
        for (name, v) in [("hbar", self.hbar), ("e", self.e), ("mu", self.mu)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Parameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Full check for dynamics: the gauge update divides by σ_H.
    pub fn validate_dynamics(&self) -> Result<()> {
        self.validate_scales()?;
        if !self.sigma_h.is_finite() || self.sigma_h == 0.0 {
            return Err(Error::Parameter(format!(
                "sigma_h must be finite and nonzero, got {}",
                self.sigma_h
            )));
        }
        Ok(())
    }

    /// Hopping energy scale ħ²/(2μ dx²).
    pub fn hopping(&self, dx: f64) -> f64 {
        self.hbar * self.hbar / (2.0 * self.mu * dx * dx)
    }

    /// Default time step 0.05·μ dx²/ħ.
    pub fn default_dt(&self, dx: f64) -> f64 {
        0.05 * self.mu * dx * dx / self.hbar
    }
}
