use serde::{Deserialize, Serialize};

use crate::error::{KerrError, Result};
use crate::geometry::{metric, Chart, KerrParams, SpacetimePoint, AXIS_GUARD};

/// Conserved quantities of a null geodesic: energy, axial angular momentum
/// and Carter's constant `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstIntegrals {
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "L")]
    pub angular_momentum: f64,
    #[serde(rename = "Q")]
    pub carter: f64,
}

impl FirstIntegrals {
    pub fn new(energy: f64, angular_momentum: f64, carter: f64) -> Self {
        FirstIntegrals { energy, angular_momentum, carter }
    }

    /// `K = Q + (L - aE)^2`.
    pub fn k(&self, spin: f64) -> f64 {
        let d = self.angular_momentum - spin * self.energy;
        self.carter + d * d
    }

    /// `xi = L/E`, defined for `E != 0`.
    pub fn xi(&self) -> Option<f64> {
        (self.energy != 0.0).then(|| self.angular_momentum / self.energy)
    }

    /// `eta = Q/E^2`, defined for `E != 0`.
    pub fn eta(&self) -> Option<f64> {
        (self.energy != 0.0).then(|| self.carter / (self.energy * self.energy))
    }

    /// `K/E^2`.
    pub fn reduced_k(&self, spin: f64) -> Option<f64> {
        (self.energy != 0.0).then(|| self.k(spin) / (self.energy * self.energy))
    }

    /// Integrals of the same curve traversed backwards.
    pub fn reversed(&self) -> Self {
        FirstIntegrals { energy: -self.energy, angular_momentum: -self.angular_momentum, carter: self.carter }
    }

    /// Natural magnitude `E^2 M^2 + L^2 + |Q|` for relative tolerances.
    pub fn scale(&self, params: &KerrParams) -> f64 {
        let m = params.mass;
        self.energy * self.energy * m * m + self.angular_momentum * self.angular_momentum + self.carter.abs()
    }

    /// Largest value of the angular potential over `theta`:
    /// `Q + (|aE| - |L|)^2` when `|L| < |aE|`, else `Q`.
    pub fn max_angular_potential(&self, spin: f64) -> f64 {
        let (ae, l) = ((spin * self.energy).abs(), self.angular_momentum.abs());
        if l < ae {
            self.carter + (ae - l) * (ae - l)
        } else {
            self.carter
        }
    }

    /// Admissibility for a null geodesic: `K >= 0` and `Theta >= 0` somewhere.
    pub fn validate(&self, params: &KerrParams) -> Result<()> {
        let tol = 1e-12 * self.scale(params).max(f64::MIN_POSITIVE);
        let k = self.k(params.spin);
        if k < -tol {
            return Err(KerrError::Inadmissible(format!("K = {k:e} < 0")));
        }
        if self.max_angular_potential(params.spin) < -tol {
            return Err(KerrError::Inadmissible(format!(
                "angular potential negative for all theta (E={}, L={}, Q={})",
                self.energy, self.angular_momentum, self.carter
            )));
        }
        Ok(())
    }

    /// Ascending coefficients of the quartic
    /// `E^2 r^4 + (a^2E^2 - L^2 - Q) r^2 + 2M((aE - L)^2 + Q) r - a^2 Q`.
    pub fn radial_coefficients(&self, params: &KerrParams) -> [f64; 5] {
        let (m, a) = (params.mass, params.spin);
        let (e, l, q) = (self.energy, self.angular_momentum, self.carter);
        let d = a * e - l;
        [-a * a * q, 2.0 * m * (d * d + q), a * a * e * e - l * l - q, 0.0, e * e]
    }
}

/// Potentials and rates entering the separated equations at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Potentials {
    /// `(r^2 + a^2) E - a L`
    pub p: f64,
    /// `L - a E sin^2(theta)`
    pub d: f64,
    /// `P^2 - Delta K`
    pub r: f64,
    /// The same quantity from the expanded quartic.
    pub r_expanded: f64,
    /// `K - D^2 / sin^2(theta)`
    pub theta: f64,
    /// `a D + (r^2 + a^2) P / Delta`
    pub t: f64,
}

pub fn p_function(params: &KerrParams, it: &FirstIntegrals, r: f64) -> f64 {
    let a = params.spin;
    (r * r + a * a) * it.energy - a * it.angular_momentum
}

pub fn radial_potential(params: &KerrParams, it: &FirstIntegrals, r: f64) -> f64 {
    let p = p_function(params, it, r);
    p * p - params.delta(r) * it.k(params.spin)
}

pub fn radial_potential_expanded(params: &KerrParams, it: &FirstIntegrals, r: f64) -> f64 {
    crate::numeric::poly_eval(&it.radial_coefficients(params), r)
}

pub fn radial_potential_derivative(params: &KerrParams, it: &FirstIntegrals, r: f64) -> f64 {
    let c = it.radial_coefficients(params);
    4.0 * c[4] * r * r * r + 2.0 * c[2] * r + c[1]
}

/// Rounding scale of `R(r)`: `|P|max^2 + |Delta| K`.
pub fn radial_scale(params: &KerrParams, it: &FirstIntegrals, r: f64) -> f64 {
    let a = params.spin;
    let pa = (r * r + a * a) * it.energy.abs() + (a * it.angular_momentum).abs();
    pa * pa + params.delta(r).abs() * it.k(a).abs()
}

/// `Q + a^2 E^2 cos^2 - L^2 cot^2`, equal to `K - D^2/sin^2`.
pub fn angular_potential(params: &KerrParams, it: &FirstIntegrals, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let a = params.spin;
    let l = it.angular_momentum;
    let cot2 = if l == 0.0 { 0.0 } else { c * c / (s * s) };
    it.carter + a * a * it.energy * it.energy * c * c - l * l * cot2
}

pub fn angular_potential_derivative(params: &KerrParams, it: &FirstIntegrals, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let a = params.spin;
    let l = it.angular_momentum;
    let axis = if l == 0.0 { 0.0 } else { l * l / (s * s * s) };
    2.0 * c * (axis - a * a * it.energy * it.energy * s)
}

pub fn potentials(params: &KerrParams, it: &FirstIntegrals, r: f64, theta: f64) -> Result<Potentials> {
    params.validate()?;
    let s2 = theta.sin().powi(2);
    if theta.sin().abs() <= AXIS_GUARD {
        return Err(KerrError::AxisSingularity { theta });
    }
    let delta = params.delta(r);
    if params.delta_factored(r).abs() <= 1e-14 * params.mass * params.mass {
        let chart = if r > params.r_plus() { Chart::BlI } else { Chart::BlII };
        return Err(KerrError::HorizonSingularity { chart, r });
    }
    let a = params.spin;
    let p = p_function(params, it, r);
    let d = it.angular_momentum - a * it.energy * s2;
    let k = it.k(a);
    Ok(Potentials {
        p,
        d,
        r: p * p - delta * k,
        r_expanded: radial_potential_expanded(params, it, r),
        theta: k - d * d / s2,
        t: a * d + (r * r + a * a) * p / delta,
    })
}

/// `(P + h u_r) / Delta` for `h` in `{-1, 0, 1}`, where `u_r = rho^2 dr/ds`.
///
/// On the null cone `(P + h u_r)(P - h u_r) = Delta K`, so the factor with
/// the larger modulus is used to avoid cancellation across a horizon.
pub(crate) fn shifted_ratio(p: f64, u_r: f64, h: f64, delta: f64, k: f64) -> f64 {
    if h == 0.0 {
        return p / delta;
    }
    let plus = p + h * u_r;
    let minus = p - h * u_r;
    if plus.abs() <= minus.abs() && minus != 0.0 {
        k / minus
    } else {
        plus / delta
    }
}

/// Chart-dependent shift of `(t, phi)`: 0 for BL, +1 for Kerr-star, -1 for
/// star-Kerr. Other charts are rejected.
pub(crate) fn chart_shift(chart: Chart) -> Option<f64> {
    match chart {
        Chart::BlI | Chart::BlII => Some(0.0),
        Chart::KerrStar => Some(1.0),
        Chart::StarKerr => Some(-1.0),
        _ => None,
    }
}

/// Coordinate velocity from `u_r = rho^2 dr/ds` and `u_theta = rho^2 dtheta/ds`.
pub(crate) fn rates(params: &KerrParams, it: &FirstIntegrals, h: f64, r: f64, theta: f64, u_r: f64, u_theta: f64) -> [f64; 4] {
    let a = params.spin;
    let (s, c) = theta.sin_cos();
    let s2 = s * s;
    let rho2 = r * r + a * a * c * c;
    let ra = r * r + a * a;
    let p = ra * it.energy - a * it.angular_momentum;
    let d = it.angular_momentum - a * it.energy * s2;
    let q = shifted_ratio(p, u_r, h, params.delta_factored(r), it.k(a));
    let l_over_s2 = if it.angular_momentum == 0.0 { 0.0 } else { it.angular_momentum / s2 };
    [
        (a * d + ra * q) / rho2,
        u_r / rho2,
        u_theta / rho2,
        (l_over_s2 - a * it.energy + a * q) / rho2,
    ]
}

fn coords_r_theta(params: &KerrParams, point: &SpacetimePoint) -> Result<(f64, f64, f64)> {
    let c = point.coords;
    match point.chart {
        Chart::BlI | Chart::BlII | Chart::KerrStar | Chart::StarKerr => Ok((c[1], c[2], 1.0)),
        Chart::ConformalKerrStar | Chart::ConformalStarKerr => {
            if c[1] <= 0.0 {
                return Err(KerrError::OutsideDomain {
                    chart: point.chart,
                    coords: c,
                    reason: "integrals need w > 0",
                });
            }
            let _ = params;
            Ok((1.0 / c[1], c[2], c[1] * c[1]))
        }
        other => Err(KerrError::ChartMismatch { kind: "first integrals", expected: Chart::BlI, got: other }),
    }
}

/// `(E, L, K, relative null defect)` without the null check.
pub(crate) fn recover(params: &KerrParams, point: &SpacetimePoint, v: &[f64; 4]) -> Result<(f64, f64, f64, f64)> {
    let (r, theta, w2) = coords_r_theta(params, point)?;
    let g = metric(params, point)?;
    let low = g.lower(v);
    let e = -low[0] / w2;
    let l = low[3] / w2;
    let a = params.spin;
    let s2 = theta.sin().powi(2);
    let rho2 = params.rho2(r, theta);
    // the conformal charts carry theta-dot unchanged
    let d = l - a * e * s2;
    let k = rho2 * rho2 * v[2] * v[2] + d * d / s2;
    let mut mag = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            mag += (g.cov[i][j] * v[i] * v[j]).abs();
        }
    }
    let norm = g.norm(v);
    Ok((e, l, k, if mag > 0.0 { norm.abs() / mag } else { 0.0 }))
}

/// `E = -d_t . g v`, `L = d_phi . g v`, and `K` from the angular equation,
/// which stays valid on the horizons.
pub fn integrals_from_velocity(params: &KerrParams, point: &SpacetimePoint, velocity: &[f64; 4]) -> Result<FirstIntegrals> {
    let (e, l, k, null_defect) = recover(params, point, velocity)?;
    if null_defect > 1e-10 {
        return Err(KerrError::NotNull { norm: null_defect });
    }
    let d = l - params.spin * e;
    Ok(FirstIntegrals::new(e, l, k - d * d))
}

/// Null velocity with prescribed integrals and signs of `dr/ds`, `dtheta/ds`.
pub fn velocity_from_integrals(
    params: &KerrParams,
    point: &SpacetimePoint,
    integrals: &FirstIntegrals,
    sign_r: f64,
    sign_theta: f64,
) -> Result<[f64; 4]> {
    let h = chart_shift(point.chart).ok_or(KerrError::ChartMismatch {
        kind: "velocity",
        expected: Chart::BlI,
        got: point.chart,
    })?;
    crate::geometry::validate_point(params, point)?;
    let (r, theta) = (point.coords[1], point.coords[2]);
    if theta.sin().abs() <= AXIS_GUARD {
        return Err(KerrError::AxisSingularity { theta });
    }
    if h == 0.0 && params.delta_factored(r).abs() <= 1e-14 * params.mass * params.mass {
        return Err(KerrError::HorizonSingularity { chart: point.chart, r });
    }
    let rr = radial_potential(params, integrals, r);
    let th = angular_potential(params, integrals, theta);
    let tol_r = 1e-12 * radial_scale(params, integrals, r);
    let tol_t = 1e-12 * integrals.scale(params) / theta.sin().powi(2);
    if rr < -tol_r {
        return Err(KerrError::ForbiddenRegion { which: "R", value: rr });
    }
    if th < -tol_t {
        return Err(KerrError::ForbiddenRegion { which: "Theta", value: th });
    }
    // within rounding of a turning point the rate is set to zero exactly
    let u_r = if rr <= tol_r { 0.0 } else { sign_r.signum() * rr.sqrt() };
    let u_t = if th <= tol_t { 0.0 } else { sign_theta.signum() * th.sqrt() };
    Ok(rates(params, integrals, h, r, theta, u_r, u_t))
}
