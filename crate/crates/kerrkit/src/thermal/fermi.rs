use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{KerrError, Result};
use crate::geometry::HorizonConstants;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// `(1 + exp(-+ beta lambda))^-1`, written so that neither branch overflows.
pub fn fermi_factor(beta: f64, sign: Sign, lambda: f64) -> f64 {
    let z = -sign.value() * beta * lambda;
    if z > 0.0 {
        let e = (-z).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + z.exp())
    }
}

/// Surface gravity and the matching inverse temperature `beta = 2 pi / kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalParams {
    pub kappa: f64,
    pub beta: f64,
}

impl ThermalParams {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(KerrError::InvalidArgument(format!("kappa must be positive, got {kappa}")));
        }
        Ok(ThermalParams { kappa, beta: 2.0 * PI / kappa })
    }

    /// Uses `kappa_+`; `beta` then agrees with `1/T_H`.
    pub fn from_horizon(h: &HorizonConstants) -> Result<Self> {
        let out = Self::new(h.kappa_plus)?;
        let mismatch = (out.beta * h.t_hawking - 1.0).abs();
        if mismatch > 1e-14 {
            return Err(KerrError::InvalidArgument(format!("beta T_H - 1 = {mismatch:e}")));
        }
        Ok(out)
    }

    pub fn chi(&self, sign: Sign, lambda: f64) -> f64 {
        fermi_factor(self.beta, sign, lambda)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_at_zero() {
        assert_eq!(fermi_factor(3.0, Sign::Plus, 0.0), 0.5);
        assert_eq!(fermi_factor(3.0, Sign::Minus, 0.0), 0.5);
    }

    #[test]
    fn no_overflow() {
        assert_eq!(fermi_factor(1.0, Sign::Plus, 1e6), 1.0);
        assert_eq!(fermi_factor(1.0, Sign::Plus, -1e6), 0.0);
        assert!(fermi_factor(1.0, Sign::Minus, 30.0) < 1e-13);
    }

    #[test]
    fn rejects_bad_kappa() {
        assert!(ThermalParams::new(0.0).is_err());
        assert!(ThermalParams::new(f64::NAN).is_err());
    }
}
