use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{KerrError, Result};

/// Mass and spin of a sub-extremal Kerr spacetime in geometric units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KerrParams {
    #[serde(rename = "M")]
    pub mass: f64,
    #[serde(rename = "a")]
    pub spin: f64,
}

impl KerrParams {
    pub fn new(mass: f64, spin: f64) -> Result<Self> {
        let p = KerrParams { mass, spin };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.mass.is_finite()
            && self.spin.is_finite()
            && self.mass > 0.0
            && self.spin.abs() < self.mass;
        if ok {
            Ok(())
        } else {
            Err(KerrError::InvalidParams { mass: self.mass, spin: self.spin })
        }
    }

    /// The same geometry with `M = 1`, i.e. spin `a/M`.
    pub fn normalized(&self) -> KerrParams {
        KerrParams { mass: 1.0, spin: self.spin / self.mass }
    }

    fn root(&self) -> f64 {
        (self.mass * self.mass - self.spin * self.spin).sqrt()
    }

    pub fn r_plus(&self) -> f64 {
        self.mass + self.root()
    }

    pub fn r_minus(&self) -> f64 {
        // a^2 / r_+ avoids cancellation for small spin
        self.spin * self.spin / self.r_plus()
    }

    pub fn delta(&self, r: f64) -> f64 {
        r * r - 2.0 * self.mass * r + self.spin * self.spin
    }

    /// Delta written as (r - r+)(r - r-), accurate close to the horizons.
    pub fn delta_factored(&self, r: f64) -> f64 {
        (r - self.r_plus()) * (r - self.r_minus())
    }

    pub fn rho2(&self, r: f64, theta: f64) -> f64 {
        let c = theta.cos();
        r * r + self.spin * self.spin * c * c
    }

    pub fn sigma2(&self, r: f64, theta: f64) -> f64 {
        let s = theta.sin();
        let a2 = self.spin * self.spin;
        (r * r + a2).powi(2) - a2 * self.delta(r) * s * s
    }
}

/// Closed-form horizon data derived from [`KerrParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizonConstants {
    pub r_minus: f64,
    pub r_plus: f64,
    pub kappa_minus: f64,
    pub kappa_plus: f64,
    #[serde(rename = "Omega_H")]
    pub omega_h: f64,
    #[serde(rename = "T_H")]
    pub t_hawking: f64,
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C")]
    pub c: f64,
}

impl HorizonConstants {
    /// `p+(theta) = r+ + i a cos(theta)`.
    pub fn p_plus(&self, spin: f64, theta: f64) -> Complex64 {
        Complex64::new(self.r_plus, spin * theta.cos())
    }
}

/// Surface gravity `(r_s - r_o) / (2 (r_s^2 + a^2))` of the horizon `r_s`.
fn kappa(r_s: f64, r_o: f64, a: f64) -> f64 {
    (r_s - r_o) / (2.0 * (r_s * r_s + a * a))
}

pub fn horizon_quantities(params: &KerrParams) -> Result<HorizonConstants> {
    params.validate()?;
    let (m, a) = (params.mass, params.spin);
    let rp = params.r_plus();
    let rm = params.r_minus();
    let kp = kappa(rp, rm, a);
    let km = kappa(rm, rp, a);
    let gap = rp - rm;
    let c1 = (-kp * rp / 2.0).exp() * gap.powf(m / (2.0 * rp));
    let c = -kp * (rp * rp + a * a) * (kp * rp).exp() * gap.powf(-m / rp);
    Ok(HorizonConstants {
        r_minus: rm,
        r_plus: rp,
        kappa_minus: km,
        kappa_plus: kp,
        omega_h: a / (rp * rp + a * a),
        t_hawking: kp / (2.0 * PI),
        c1,
        c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schwarzschild_constants() {
        let h = horizon_quantities(&KerrParams::new(1.0, 0.0).unwrap()).unwrap();
        assert_eq!(h.r_plus, 2.0);
        assert_eq!(h.r_minus, 0.0);
        assert!((h.kappa_plus - 0.25).abs() < 1e-15);
        assert!((h.t_hawking - 1.0 / (8.0 * PI)).abs() < 1e-15);
        assert_eq!(h.omega_h, 0.0);
    }

    #[test]
    fn kappa_ratio_at_half_spin() {
        let p = KerrParams::new(1.0, 0.5).unwrap();
        let h = horizon_quantities(&p).unwrap();
        assert!((h.kappa_plus / h.kappa_minus + h.r_minus / h.r_plus).abs() < 1e-12);
        assert!(h.kappa_minus < 0.0 && h.kappa_plus > 0.0);
    }

    #[test]
    fn kappa_plus_decreases_towards_extremality() {
        let ks: Vec<f64> = [0.9, 0.99, 0.999]
            .iter()
            .map(|&a| horizon_quantities(&KerrParams::new(1.0, a).unwrap()).unwrap().kappa_plus)
            .collect();
        assert!(ks[0] > ks[1] && ks[1] > ks[2] && ks[2] > 0.0);
    }

    #[test]
    fn rejects_extremal_and_bad_mass() {
        assert!(KerrParams::new(1.0, 1.0).is_err());
        assert!(KerrParams::new(1.0, -1.2).is_err());
        assert!(KerrParams::new(0.0, 0.0).is_err());
        assert!(KerrParams::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn delta_forms_agree() {
        let p = KerrParams::new(1.3, 0.7).unwrap();
        for r in [0.1, 1.0, 2.0, 5.0, 40.0] {
            assert!((p.delta(r) - p.delta_factored(r)).abs() < 1e-12 * (1.0 + r * r));
        }
    }
}
