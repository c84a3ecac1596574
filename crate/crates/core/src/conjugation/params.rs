use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Constant coefficients of P = α∂s + β∂ss + Δ².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorParams {
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// β < 0.
    Elliptic,
    /// β = 0, α ≠ 0.
    Parabolic,
    /// Anything else (β > 0, or α = β = 0).
    Other,
}

impl OperatorParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(Error::Config("α and β must be finite".into()));
        }
        Ok(OperatorParams { alpha, beta })
    }

    pub fn regime(&self) -> Regime {
        if self.beta < 0.0 {
            Regime::Elliptic
        } else if self.beta == 0.0 && self.alpha != 0.0 {
            Regime::Parabolic
        } else {
            Regime::Other
        }
    }
}
