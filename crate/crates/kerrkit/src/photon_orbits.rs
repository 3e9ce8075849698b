//! Spherical photon orbits: double zeros of the radial potential.
//!
//! For `E = 1` the conditions `R(r0) = R'(r0) = 0` fix `(xi, eta)` as
//! functions of `r0`. The formulas are written for `M = 1` and rescaled
//! (`xi ~ M`, `eta ~ M^2`).

use serde::{Deserialize, Serialize};

use crate::error::{KerrError, Result};
use crate::geodesics::FirstIntegrals;
use crate::geometry::{killing_norm, Chart, KerrParams, KillingField, SpacetimePoint};
use crate::numeric::{bisect, golden_min, poly_eval, poly_scale, real_roots};

/// Relative size of `R` at a critical point below which it is a double zero.
pub const DOUBLE_ROOT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalLocus {
    pub r0: f64,
    pub xi: f64,
    pub eta: f64,
}

impl CriticalLocus {
    /// Integrals `(E, L, Q) = (1, xi, eta)`.
    pub fn integrals(&self) -> FirstIntegrals {
        FirstIntegrals::new(1.0, self.xi, self.eta)
    }
}

/// `(xi, eta)` of the spherical orbit at radius `r0`.
pub fn critical_locus(params: &KerrParams, r0: f64) -> Result<CriticalLocus> {
    params.validate()?;
    let m = params.mass;
    let a = params.spin / m;
    let r = r0 / m;
    if a == 0.0 {
        return Err(KerrError::InvalidArgument("locus formulas are singular at a = 0; use radial_roots".into()));
    }
    if (r - 1.0).abs() < 1e-12 {
        return Err(KerrError::InvalidArgument(format!("r0 = {r0} is the pole r0 = M")));
    }
    if r0 < params.r_minus() {
        return Err(KerrError::InvalidArgument(format!("r0 = {r0} below r_-")));
    }
    let delta = r * r - 2.0 * r + a * a;
    let xi = ((r * r - a * a) - r * delta) / (a * (r - 1.0));
    let eta = r * r * r * (4.0 * a * a - r * (r - 3.0).powi(2)) / (a * a * (r - 1.0).powi(2));
    Ok(CriticalLocus { r0, xi: xi * m, eta: eta * m * m })
}

/// Radii bounding the spherical orbits: the roots of `r (r - 3M)^2 = 4 M a^2`
/// next to `3M`, where `eta` changes sign.
pub fn spherical_orbit_range(params: &KerrParams) -> Result<(f64, f64)> {
    params.validate()?;
    let m = params.mass;
    let a = params.spin / m;
    if a == 0.0 {
        return Ok((3.0 * m, 3.0 * m));
    }
    let f = |r: f64| r * (r - 3.0).powi(2) - 4.0 * a * a;
    let lo = bisect(f, 1.0, 3.0, 1e-15)?;
    let hi = bisect(f, 3.0, 4.0, 1e-15)?;
    Ok((lo * m, hi * m))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootInfo {
    pub r: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootAnalysis {
    /// Real roots of `R` on `[r_-, inf)`, ascending.
    pub roots: Vec<RootInfo>,
    pub sign_at_rplus: i8,
    pub sign_at_rminus: i8,
    pub identically_zero: bool,
    /// Degree of `R` after dropping vanishing leading terms.
    pub degree: Option<usize>,
    /// A critical value of `R` lay just above the double-root tolerance.
    pub near_degenerate: bool,
}

impl RootAnalysis {
    pub fn double_roots(&self) -> impl Iterator<Item = f64> + '_ {
        self.roots.iter().filter(|r| r.multiplicity >= 2).map(|r| r.r)
    }
}

fn sign_with_tol(v: f64, scale: f64) -> i8 {
    if v.abs() <= 1e-12 * scale {
        0
    } else if v > 0.0 {
        1
    } else {
        -1
    }
}

/// Roots of the radial quartic with multiplicities. Degenerate degrees
/// (`E = 0`) are handled by the same recursion.
pub fn radial_roots(params: &KerrParams, integrals: &FirstIntegrals) -> RootAnalysis {
    let mut c = integrals.radial_coefficients(params);
    // coefficients that cancel to rounding level are zero
    let (m, a) = (params.mass, params.spin);
    let (e, l, q) = (integrals.energy, integrals.angular_momentum, integrals.carter);
    let d = (a * e).abs() + l.abs();
    let cancel = [0.0, 2.0 * m * (d * d + q.abs()), a * a * e * e + l * l + q.abs(), 0.0, 0.0];
    for (ci, s) in c.iter_mut().zip(cancel) {
        if ci.abs() <= 8.0 * f64::EPSILON * s {
            *ci = 0.0;
        }
    }
    let rr = real_roots(&c, DOUBLE_ROOT_TOL);
    let (rp, rm) = (params.r_plus(), params.r_minus());
    let floor = rm - 1e-12 * params.mass;
    let roots = rr
        .roots
        .iter()
        .filter(|r| r.x >= floor)
        .map(|r| RootInfo { r: r.x, multiplicity: r.multiplicity })
        .collect();
    RootAnalysis {
        roots,
        sign_at_rplus: sign_with_tol(poly_eval(&c, rp), poly_scale(&c, rp)),
        sign_at_rminus: sign_with_tol(poly_eval(&c, rm), poly_scale(&c, rm)),
        identically_zero: rr.degree.is_none(),
        degree: rr.degree,
        near_degenerate: rr.near_degenerate,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub mass: f64,
    pub spin: f64,
    pub r0: f64,
    pub xi: f64,
    pub eta: f64,
    /// `min_theta |T(r0, theta)|` for `E = 1`.
    pub min_abs_t: f64,
    pub theta_at_min_t: f64,
    pub max_norm_vh: f64,
    pub max_norm_vi: f64,
    pub timelike_everywhere: bool,
}

const THETA_GRID: usize = 721;
const THETA_EDGE: f64 = 1e-6;

/// Minimum of `f` on `[lo, hi]`: grid scan then golden-section refinement
/// around the best grid point.
fn grid_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> (f64, f64) {
    let n = THETA_GRID;
    let step = (hi - lo) / (n - 1) as f64;
    let (mut best_i, mut best) = (0, f64::INFINITY);
    for i in 0..n {
        let v = f(lo + step * i as f64);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let a = (lo + step * best_i.saturating_sub(1) as f64).max(lo);
    let b = (lo + step * (best_i + 1) as f64).min(hi);
    let (x, fx) = golden_min(&f, a, b, 1e-12);
    if fx < best {
        (x, fx)
    } else {
        (lo + step * best_i as f64, best)
    }
}

/// `T(r, theta) = (sigma^2 E - 2 a M r L) / Delta`.
pub fn t_function(params: &KerrParams, integrals: &FirstIntegrals, r: f64, theta: f64) -> f64 {
    let (m, a) = (params.mass, params.spin);
    (params.sigma2(r, theta) * integrals.energy - 2.0 * a * m * r * integrals.angular_momentum) / params.delta(r)
}

/// `|T|` and Killing-field norms along the orbit sphere `r = r0`.
pub fn orbit_checks(params: &KerrParams, r0: f64) -> Result<OrbitReport> {
    if r0 <= params.r_plus() {
        return Err(KerrError::InvalidArgument(format!("r0 = {r0} must exceed r_+ = {}", params.r_plus())));
    }
    let loc = critical_locus(params, r0)?;
    let it = loc.integrals();
    let pi = std::f64::consts::PI;
    let (theta_min, min_t) = grid_min(|th| t_function(params, &it, r0, th).abs(), 0.0, pi);
    let norm = |field: KillingField, th: f64| {
        let th = th.clamp(THETA_EDGE, pi - THETA_EDGE);
        let pt = SpacetimePoint::new(Chart::BlI, [0.0, r0, th, 0.0]);
        killing_norm(params, field, &pt).unwrap_or(f64::NAN)
    };
    let (_, neg_vh) = grid_min(|th| -norm(KillingField::VH, th), 0.0, pi);
    let (_, neg_vi) = grid_min(|th| -norm(KillingField::VI, th), 0.0, pi);
    let (max_vh, max_vi) = (-neg_vh, -neg_vi);
    Ok(OrbitReport {
        mass: params.mass,
        spin: params.spin,
        r0,
        xi: loc.xi,
        eta: loc.eta,
        min_abs_t: min_t,
        theta_at_min_t: theta_min,
        max_norm_vh: max_vh,
        max_norm_vi: max_vi,
        timelike_everywhere: max_vh < 0.0 && max_vi < 0.0,
    })
}

/// Worst-case orbit checks over the whole locus of one spacetime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocusSummary {
    pub mass: f64,
    pub spin: f64,
    pub r_lo: f64,
    pub r_hi: f64,
    /// `max |r0 - 3M| / |a|` over the locus.
    pub spread_ratio: f64,
    pub min_abs_t: f64,
    pub max_norm_vh: f64,
    pub max_norm_vi: f64,
    pub max_abs_xi: f64,
    pub max_abs_eta: f64,
    pub timelike_everywhere: bool,
}

/// Runs [`orbit_checks`] on `n` radii spanning the spherical orbits.
pub fn locus_summary(params: &KerrParams, n: usize) -> Result<LocusSummary> {
    let (lo, hi) = spherical_orbit_range(params)?;
    let n = n.max(2);
    let mut s = LocusSummary {
        mass: params.mass,
        spin: params.spin,
        r_lo: lo,
        r_hi: hi,
        spread_ratio: 0.0,
        min_abs_t: f64::INFINITY,
        max_norm_vh: f64::NEG_INFINITY,
        max_norm_vi: f64::NEG_INFINITY,
        max_abs_xi: 0.0,
        max_abs_eta: 0.0,
        timelike_everywhere: true,
    };
    for i in 0..n {
        let r0 = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let rep = orbit_checks(params, r0)?;
        s.spread_ratio = s.spread_ratio.max((r0 - 3.0 * params.mass).abs() / params.spin.abs());
        s.min_abs_t = s.min_abs_t.min(rep.min_abs_t);
        s.max_norm_vh = s.max_norm_vh.max(rep.max_norm_vh);
        s.max_norm_vi = s.max_norm_vi.max(rep.max_norm_vi);
        s.max_abs_xi = s.max_abs_xi.max(rep.xi.abs());
        s.max_abs_eta = s.max_abs_eta.max(rep.eta.abs());
        s.timelike_everywhere &= rep.timelike_everywhere;
    }
    Ok(s)
}

/// Smallest `a/M` in `(lo, hi)` at which the Killing fields stop being
/// timelike somewhere on the orbit locus, by bisection to `tol`.
///
/// Returns `None` when timelikeness holds at `hi` as well.
pub fn timelike_threshold(lo: f64, hi: f64, tol: f64, n_radii: usize) -> Result<Option<f64>> {
    let ok = |a: f64| -> Result<bool> { Ok(locus_summary(&KerrParams::new(1.0, a)?, n_radii)?.timelike_everywhere) };
    if !ok(lo)? {
        return Err(KerrError::InvalidArgument(format!("timelikeness already fails at a = {lo}")));
    }
    if ok(hi)? {
        return Ok(None);
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if ok(mid)? {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(Some(0.5 * (a + b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schwarzschild_photon_sphere_is_double() {
        let p = KerrParams::new(1.0, 0.0).unwrap();
        let ra = radial_roots(&p, &FirstIntegrals::new(1.0, 3.0, 18.0));
        let dbl: Vec<f64> = ra.double_roots().collect();
        assert_eq!(dbl.len(), 1);
        assert!((dbl[0] - 3.0).abs() < 1e-7);
    }

    #[test]
    fn identically_zero_potential() {
        let p = KerrParams::new(1.0, 0.3).unwrap();
        let ra = radial_roots(&p, &FirstIntegrals::new(0.0, 0.0, 0.0));
        assert!(ra.identically_zero);
    }

    #[test]
    fn orbit_range_brackets_three() {
        let p = KerrParams::new(2.0, 0.2).unwrap();
        let (lo, hi) = spherical_orbit_range(&p).unwrap();
        assert!(lo < 6.0 && hi > 6.0);
        let loc = critical_locus(&p, lo).unwrap();
        assert!(loc.eta.abs() < 1e-9);
    }

    #[test]
    fn pole_is_rejected() {
        let p = KerrParams::new(1.0, 0.1).unwrap();
        assert!(critical_locus(&p, 1.0).is_err());
    }
}
