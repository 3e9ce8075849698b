use serde::{Deserialize, Serialize};

use super::profiles::RadialProfiles;
use crate::error::{KerrError, Result};
use crate::geometry::{chart_map, metric, Chart, KerrParams, SpacetimePoint};

/// Distance in `r` (units of `M`) below which a point counts as sitting on a
/// profile kink.
pub const KINK_GUARD: f64 = 1e-9;
/// Smallest `T` accepted for `Z`.
pub const Z_MIN_LEVEL: f64 = 10.0;

/// Candidate Cauchy surfaces, each the zero set of a function `u`.
/// `level` and `n` are in units of `M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum SurfaceSpec {
    /// `u = t - T` on `M_I`.
    SigmaT { level: f64 },
    /// `u = t + x_n(r) - T` on `M_I`.
    SigmaBar { level: f64, n: f64 },
    /// `u = t - x~_n(r) - T` on `M_I`.
    SigmaTilde { level: f64, n: f64 },
    /// `u = t* - v(r) + T` for `r <= r_T`, `t` beyond, on `M_I u M_II`.
    Z { level: f64 },
    /// `u = U - V` on the Kruskal extension.
    SigmaM,
}

/// Where a surface lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    #[serde(rename = "M_I")]
    Exterior,
    #[serde(rename = "M_I+II")]
    ExteriorAndInterior,
    #[serde(rename = "M")]
    Kruskal,
}

impl SurfaceSpec {
    pub fn name(&self) -> &'static str {
        match self {
            SurfaceSpec::SigmaT { .. } => "SigmaT",
            SurfaceSpec::SigmaBar { .. } => "SigmaBar",
            SurfaceSpec::SigmaTilde { .. } => "SigmaTilde",
            SurfaceSpec::Z { .. } => "Z",
            SurfaceSpec::SigmaM => "SigmaM",
        }
    }

    pub fn region(&self) -> Region {
        match self {
            SurfaceSpec::Z { .. } => Region::ExteriorAndInterior,
            SurfaceSpec::SigmaM => Region::Kruskal,
            _ => Region::Exterior,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = match *self {
            SurfaceSpec::SigmaT { level } | SurfaceSpec::Z { level } => level.is_finite(),
            SurfaceSpec::SigmaBar { level, n } | SurfaceSpec::SigmaTilde { level, n } => {
                level.is_finite() && n.is_finite()
            }
            SurfaceSpec::SigmaM => true,
        };
        if !finite {
            return Err(KerrError::InvalidArgument(format!("{self:?}: T and n must be finite")));
        }
        if let SurfaceSpec::Z { level } = *self {
            if level < Z_MIN_LEVEL {
                return Err(KerrError::InvalidArgument(format!("Z needs T >= {Z_MIN_LEVEL}, got {level}")));
            }
        }
        Ok(())
    }
}

/// A surface prepared for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Surface {
    pub params: KerrParams,
    pub spec: SurfaceSpec,
    pub profiles: RadialProfiles,
    /// Kink radii in units of `M`.
    pub kinks: Vec<f64>,
    /// `r_T` in units of `M` (only for `Z`).
    pub r_t: Option<f64>,
}

impl Surface {
    pub fn new(params: &KerrParams, spec: SurfaceSpec) -> Result<Self> {
        spec.validate()?;
        let profiles = RadialProfiles::new(params)?;
        let (kinks, r_t) = match spec {
            SurfaceSpec::SigmaBar { n, .. } => (profiles.x_n_kinks(n)?, None),
            SurfaceSpec::SigmaTilde { n, .. } => (profiles.x_tilde_n_kinks(n)?, None),
            SurfaceSpec::Z { level } => {
                let rt = profiles.r_t(level)?;
                (vec![rt], Some(rt))
            }
            _ => (Vec::new(), None),
        };
        Ok(Surface { params: *params, spec, profiles, kinks, r_t })
    }

    fn mass(&self) -> f64 {
        self.params.mass
    }

    fn mismatch(&self, expected: Chart, got: Chart) -> KerrError {
        KerrError::ChartMismatch { kind: self.spec.name(), expected, got }
    }

    fn check_kinks(&self, r1: f64) -> Result<()> {
        for &k in &self.kinks {
            let dist = (r1 - k).abs();
            if dist <= KINK_GUARD {
                return Err(KerrError::KinkProximity { r: k * self.mass(), dist: dist * self.mass() });
            }
        }
        Ok(())
    }

    /// `BL_I` coordinates of an exterior point given in `BL_I` or in a star
    /// chart with `r > r+`.
    fn to_bl_exterior(&self, point: &SpacetimePoint) -> Result<SpacetimePoint> {
        match point.chart {
            Chart::BlI => Ok(*point),
            Chart::KerrStar | Chart::StarKerr if point.coords[1] > self.params.r_plus() => {
                chart_map(&self.params, point, Chart::BlI)
            }
            got => Err(self.mismatch(Chart::BlI, got)),
        }
    }

    /// Point in the chart where `Z` is evaluated: `BL_I` beyond `r_T`,
    /// Kerr-star inside.
    fn z_point(&self, point: &SpacetimePoint) -> Result<(SpacetimePoint, bool)> {
        let m = self.mass();
        let rt = self.r_t.expect("Z surface") * m;
        let r = match point.chart {
            Chart::BlI | Chart::BlII | Chart::KerrStar => point.coords[1],
            got => return Err(self.mismatch(Chart::KerrStar, got)),
        };
        if r > rt {
            Ok((chart_map(&self.params, point, Chart::BlI)?, false))
        } else {
            Ok((chart_map(&self.params, point, Chart::KerrStar)?, true))
        }
    }

    /// `u` at a point; the surface is `u = 0`.
    pub fn value(&self, point: &SpacetimePoint) -> Result<f64> {
        let m = self.mass();
        let pr = &self.profiles;
        match self.spec {
            SurfaceSpec::SigmaT { level } => Ok(self.to_bl_exterior(point)?.coords[0] - level * m),
            SurfaceSpec::SigmaBar { level, n } => {
                let p = self.to_bl_exterior(point)?;
                Ok(p.coords[0] + m * pr.x_n(p.coords[1] / m, n) - level * m)
            }
            SurfaceSpec::SigmaTilde { level, n } => {
                let p = self.to_bl_exterior(point)?;
                Ok(p.coords[0] - m * pr.x_tilde_n(p.coords[1] / m, n)? - level * m)
            }
            SurfaceSpec::Z { level } => {
                let (p, inner) = self.z_point(point)?;
                if inner {
                    Ok(p.coords[0] - m * pr.v(p.coords[1] / m)? + level * m)
                } else {
                    Ok(p.coords[0])
                }
            }
            SurfaceSpec::SigmaM => {
                let p = chart_map(&self.params, point, Chart::Kbl)?;
                Ok(p.coords[0] - p.coords[1])
            }
        }
    }

    /// `du` in the chart of the returned point.
    fn covector(&self, point: &SpacetimePoint) -> Result<(SpacetimePoint, [f64; 4])> {
        let m = self.mass();
        let pr = &self.profiles;
        match self.spec {
            SurfaceSpec::SigmaT { .. } => Ok((self.to_bl_exterior(point)?, [1.0, 0.0, 0.0, 0.0])),
            SurfaceSpec::SigmaBar { n, .. } => {
                let p = self.to_bl_exterior(point)?;
                let r1 = p.coords[1] / m;
                self.check_kinks(r1)?;
                Ok((p, [1.0, pr.dx_n(r1, n), 0.0, 0.0]))
            }
            SurfaceSpec::SigmaTilde { n, .. } => {
                let p = self.to_bl_exterior(point)?;
                let r1 = p.coords[1] / m;
                self.check_kinks(r1)?;
                Ok((p, [1.0, -pr.dx_tilde_n(r1, n)?, 0.0, 0.0]))
            }
            SurfaceSpec::Z { .. } => {
                let (p, inner) = self.z_point(point)?;
                let r1 = p.coords[1] / m;
                self.check_kinks(r1)?;
                let dr = if inner { -pr.dv(r1) } else { 0.0 };
                Ok((p, [1.0, dr, 0.0, 0.0]))
            }
            SurfaceSpec::SigmaM => Ok((chart_map(&self.params, point, Chart::Kbl)?, [1.0, -1.0, 0.0, 0.0])),
        }
    }

    /// `du . g^{-1} du`; negative iff `du` is timelike.
    pub fn gradient_norm(&self, point: &SpacetimePoint) -> Result<f64> {
        let (p, w) = self.covector(point)?;
        Ok(metric(&self.params, &p)?.conorm(&w))
    }

    /// Sum of the moduli of the terms of `du . g^{-1} du`, the scale for
    /// rounding in the norm.
    pub fn gradient_scale(&self, point: &SpacetimePoint) -> Result<f64> {
        let (p, w) = self.covector(point)?;
        let g = metric(&self.params, &p)?;
        let mut s = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                s += (w[i] * g.contra[i][j] * w[j]).abs();
            }
        }
        Ok(s)
    }

    /// Analytic upper bound `B` with `du . g^{-1} du <= B < 0`, where one is
    /// known: for `SigmaBar` and `SigmaTilde` everywhere, for `Z` on
    /// `r <= r_T`.
    pub fn gradient_bound(&self, point: &SpacetimePoint) -> Result<Option<f64>> {
        let m = self.mass();
        let a = self.profiles.a;
        let (p, _) = self.covector(point)?;
        let (r, theta) = (p.coords[1] / m, p.coords[2]);
        let rho2 = r * r + a * a * theta.cos().powi(2);
        let delta = r * r - 2.0 * r + a * a;
        let b = match self.spec {
            SurfaceSpec::SigmaBar { .. } => {
                Some(-(2.0 * r * (r * r + a * a) + (2.0 * r - a * a) * delta) / (delta * rho2))
            }
            SurfaceSpec::SigmaTilde { .. } => Some(-1.0 / rho2),
            SurfaceSpec::Z { .. } if r <= self.r_t.expect("Z surface") => Some((-r * r - 2.0 * r) / rho2),
            _ => None,
        };
        Ok(b)
    }
}

/// `du . g^{-1} du` for a single point.
pub fn surface_gradient_norm(params: &KerrParams, spec: SurfaceSpec, point: &SpacetimePoint) -> Result<f64> {
    Surface::new(params, spec)?.gradient_norm(point)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_t_norm_is_g_tt() {
        let p = KerrParams::new(2.0, 0.6).unwrap();
        let pt = SpacetimePoint::new(Chart::BlI, [0.0, 7.0, 1.1, 0.0]);
        let n = surface_gradient_norm(&p, SurfaceSpec::SigmaT { level: 0.0 }, &pt).unwrap();
        assert_eq!(n, metric(&p, &pt).unwrap().contra[0][0]);
        assert!(n < 0.0);
    }

    #[test]
    fn sigma_m_at_the_crossing_sphere() {
        let p = KerrParams::new(1.0, 0.3).unwrap();
        let pt = SpacetimePoint::new(Chart::Kbl, [0.0, 0.0, 0.8, 0.0]);
        assert!(surface_gradient_norm(&p, SurfaceSpec::SigmaM, &pt).unwrap() < 0.0);
    }

    #[test]
    fn kinks_are_rejected() {
        let p = KerrParams::new(1.0, 0.2).unwrap();
        let s = Surface::new(&p, SurfaceSpec::SigmaTilde { level: 0.0, n: 1.0 }).unwrap();
        let pt = SpacetimePoint::new(Chart::BlI, [0.0, 3.0 + 1e-10, 1.0, 0.0]);
        assert!(matches!(s.gradient_norm(&pt), Err(KerrError::KinkProximity { .. })));
    }

    #[test]
    fn wrong_chart_is_rejected() {
        let p = KerrParams::new(1.0, 0.2).unwrap();
        let pt = SpacetimePoint::new(Chart::Kbl, [1.0, 1.0, 1.0, 0.0]);
        let e = surface_gradient_norm(&p, SurfaceSpec::SigmaT { level: 0.0 }, &pt);
        assert!(matches!(e, Err(KerrError::ChartMismatch { .. })));
    }

    #[test]
    fn z_is_continuous_at_r_t() {
        let p = KerrParams::new(1.0, 0.3).unwrap();
        let s = Surface::new(&p, SurfaceSpec::Z { level: 12.0 }).unwrap();
        let rt = s.r_t.unwrap();
        let h = 1e-10 * (rt - p.r_plus());
        let below = s.value(&SpacetimePoint::new(Chart::BlI, [4.0, rt - h, 1.0, 0.0])).unwrap();
        let above = s.value(&SpacetimePoint::new(Chart::BlI, [4.0, rt + h, 1.0, 0.0])).unwrap();
        assert!((below - above).abs() < 1e-6, "{below} {above}");
    }
}
