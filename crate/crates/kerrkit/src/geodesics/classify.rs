use std::fmt;

use serde::{Deserialize, Serialize};

use super::integrals::{p_function, radial_potential, rates, FirstIntegrals};
use super::integrator::{integrate_maximal, GeodesicState, IntegrationConfig};
use crate::error::{KerrError, Result};
use crate::geometry::{Chart, KerrParams};
use crate::photon_orbits::{radial_roots, DOUBLE_ROOT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Block {
    #[serde(rename = "M_I")]
    MI,
    #[serde(rename = "M_II")]
    MII,
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Block::MI => "M_I",
            Block::MII => "M_II",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Horizon {
    Outer,
    Inner,
}

impl Horizon {
    fn label(&self) -> &'static str {
        match self {
            Horizon::Outer => "r+",
            Horizon::Inner => "r-",
        }
    }
}

/// Asymptotic behaviour of `r` at one end of a maximal geodesic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Endpoint {
    /// Reaches a horizon at finite affine parameter.
    Horizon(Horizon),
    /// `r -> infinity` as the affine parameter diverges.
    Infinity,
    /// `r` tends to a double root of `R` as the affine parameter diverges.
    DoubleRootAsymptote,
    /// `r` is constant at a double root.
    SphericalOrbit,
    /// Reaches the bifurcation sphere of a horizon.
    CrossingSphere(Horizon),
}

/// Start and end of a future-directed null geodesic, with its block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeodesicType {
    pub start: Endpoint,
    pub end: Endpoint,
    pub block: Block,
}

impl fmt::Display for GeodesicType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.start == Endpoint::SphericalOrbit {
            return f.write_str("[r0]");
        }
        let start = match self.start {
            Endpoint::Horizon(h) => format!("[{}", h.label()),
            Endpoint::Infinity => "]∞".into(),
            Endpoint::DoubleRootAsymptote => "]r0".into(),
            Endpoint::SphericalOrbit => "[r0".into(),
            Endpoint::CrossingSphere(h) => format!("[S({})", h.label()),
        };
        let end = match self.end {
            Endpoint::Horizon(h) => format!("{}]", h.label()),
            Endpoint::Infinity => "∞[".into(),
            Endpoint::DoubleRootAsymptote => "r0[".into(),
            Endpoint::SphericalOrbit => "r0]".into(),
            Endpoint::CrossingSphere(h) => format!("S({})]", h.label()),
        };
        write!(f, "{start}→{end}")
    }
}

/// Where the geodesic is observed: block, radius, and the sign of `dr/ds`
/// along its future-directed orientation. In `M_II` the radius decreases
/// towards the future and `sign_r` is not used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StartCondition {
    pub block: Block,
    pub r: f64,
    pub sign_r: f64,
}

/// Distance to a double root, relative to `max(M, r0)`, below which the
/// geodesic is taken to be the spherical orbit itself.
const ON_ORBIT: f64 = 1e-9;
/// Between `ON_ORBIT` and this distance the start cannot be told apart from
/// the orbit.
const NEAR_ORBIT: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Barrier {
    Horizon,
    Simple(f64),
    Double(f64),
    Infinity,
}

/// Root-structure classification of the future-directed null geodesic
/// through `start`.
pub fn classify(params: &KerrParams, integrals: &FirstIntegrals, start: &StartCondition) -> Result<GeodesicType> {
    params.validate()?;
    let m = params.mass;
    let scale = integrals.scale(params).max(f64::MIN_POSITIVE);
    let k = integrals.k(params.spin);
    if k < -1e-12 * scale {
        return Err(KerrError::Inadmissible(format!("K = {k:e} < 0")));
    }
    let (rp, rm) = (params.r_plus(), params.r_minus());
    let roots = radial_roots(params, integrals);
    if roots.identically_zero {
        return Err(KerrError::Ambiguous("R vanishes identically; no null geodesic of this kind in the block".into()));
    }
    let r = start.r;
    match start.block {
        Block::MII => {
            if !(r > rm && r < rp) {
                return Err(KerrError::InvalidArgument(format!("r = {r} is not in M_II")));
            }
            let end_type = |rh: f64, hz: Horizon| -> Endpoint {
                let p = p_function(params, integrals, rh);
                if p * p <= DOUBLE_ROOT_TOL * scale * m * m {
                    Endpoint::CrossingSphere(hz)
                } else {
                    Endpoint::Horizon(hz)
                }
            };
            Ok(GeodesicType { start: end_type(rp, Horizon::Outer), end: end_type(rm, Horizon::Inner), block: Block::MII })
        }
        Block::MI => {
            if r <= rp {
                return Err(KerrError::InvalidArgument(format!("r = {r} is not in M_I")));
            }
            if !(start.sign_r == 1.0 || start.sign_r == -1.0) {
                return Err(KerrError::InvalidArgument("sign_r must be +1 or -1".into()));
            }
            if roots.near_degenerate {
                return Err(KerrError::Ambiguous("a critical value of R lies at the double-root tolerance".into()));
            }
            let outside: Vec<_> = roots.roots.iter().filter(|x| x.r > rp).collect();
            for x in outside.iter().filter(|x| x.multiplicity >= 2) {
                let d = (r - x.r).abs() / m.max(x.r);
                if d <= ON_ORBIT {
                    return Ok(GeodesicType { start: Endpoint::SphericalOrbit, end: Endpoint::SphericalOrbit, block: Block::MI });
                }
                if d <= NEAR_ORBIT {
                    return Err(KerrError::Ambiguous(format!("start r = {r} within {d:e} of the double root {}", x.r)));
                }
            }
            // a start on a simple root sits in the component where R > 0
            let mut r_eval = r;
            for x in outside.iter().filter(|x| x.multiplicity % 2 == 1) {
                if (r - x.r).abs() <= 1e-9 * m.max(x.r) {
                    let side = if radial_potential(params, integrals, x.r + 1e-6 * m) > 0.0 { 1.0 } else { -1.0 };
                    r_eval = x.r + side * 1e-6 * m.max(x.r);
                }
            }
            if radial_potential(params, integrals, r_eval) < -1e-10 * scale * m * m {
                return Err(KerrError::ForbiddenRegion { which: "R", value: radial_potential(params, integrals, r_eval) });
            }
            let lo = outside
                .iter()
                .filter(|x| x.r < r_eval)
                .last()
                .map(|x| barrier(x.r, x.multiplicity))
                .unwrap_or(Barrier::Horizon);
            let hi = outside
                .iter()
                .find(|x| x.r > r_eval)
                .map(|x| barrier(x.r, x.multiplicity))
                .unwrap_or(Barrier::Infinity);
            if lo == Barrier::Horizon {
                let p = p_function(params, integrals, rp);
                if p * p <= DOUBLE_ROOT_TOL * scale * m * m {
                    return Err(KerrError::Ambiguous("R(r+) vanishes: the horizon is a root of R".into()));
                }
            }
            if matches!(lo, Barrier::Simple(_)) && matches!(hi, Barrier::Simple(_)) {
                return Err(KerrError::Ambiguous("R >= 0 on a bounded interval between simple roots".into()));
            }
            let (forward, backward) = if start.sign_r > 0.0 { (hi, lo) } else { (lo, hi) };
            let end = resolve(forward, lo, hi)?;
            let begin = resolve(backward, lo, hi)?;
            Ok(GeodesicType { start: begin, end, block: Block::MI })
        }
    }
}

fn barrier(r: f64, multiplicity: usize) -> Barrier {
    if multiplicity >= 2 {
        Barrier::Double(r)
    } else {
        Barrier::Simple(r)
    }
}

/// Endpoint reached when moving towards `b`; a simple root reflects the
/// motion to the opposite barrier.
fn resolve(b: Barrier, lo: Barrier, hi: Barrier) -> Result<Endpoint> {
    let direct = |b: Barrier| match b {
        Barrier::Horizon => Some(Endpoint::Horizon(Horizon::Outer)),
        Barrier::Infinity => Some(Endpoint::Infinity),
        Barrier::Double(_) => Some(Endpoint::DoubleRootAsymptote),
        Barrier::Simple(_) => None,
    };
    if let Some(e) = direct(b) {
        return Ok(e);
    }
    let other = if b == lo { hi } else { lo };
    direct(other).ok_or_else(|| KerrError::Ambiguous("bounded radial motion".into()))
}

/// Classification by integrating the maximal geodesic through `state` in
/// both directions. The state is reoriented to be future-directed first.
pub fn classify_by_integration(
    params: &KerrParams,
    integrals: &FirstIntegrals,
    state: &GeodesicState,
    config: &IntegrationConfig,
) -> Result<GeodesicType> {
    let (oriented, it) = future_oriented(params, integrals, state)?;
    let path = integrate_maximal(params, &oriented, &it, config)?;
    let on_orbit = path.start.is_none()
        && path.end.is_none()
        && {
            let r0 = state.point.coords[1];
            let tol = 1e-6 * params.mass;
            path.samples.iter().all(|s| (s.point.coords[1] - r0).abs() < tol)
        };
    if on_orbit {
        return Ok(GeodesicType { start: Endpoint::SphericalOrbit, end: Endpoint::SphericalOrbit, block: path.block });
    }
    match path.geodesic_type() {
        Some(t) => Ok(t),
        None => Err(KerrError::Ambiguous("integration budget exhausted before an endpoint".into())),
    }
}

/// Future-directed state and integrals describing the same curve as
/// `(integrals, state)`; the second component of the result is the
/// possibly reversed integrals.
pub fn future_oriented(
    params: &KerrParams,
    integrals: &FirstIntegrals,
    state: &GeodesicState,
) -> Result<(GeodesicState, FirstIntegrals)> {
    let p = &state.point;
    let (r, th) = (p.coords[1], p.coords[2]);
    let future = match p.chart {
        Chart::BlI => {
            let v = rates(params, integrals, 0.0, r, th, 0.0, 0.0);
            if v[0] == 0.0 {
                return Err(KerrError::Ambiguous("dt/ds vanishes; time orientation undecided".into()));
            }
            v[0] > 0.0
        }
        Chart::BlII => state.sign_r < 0.0,
        other => {
            return Err(KerrError::ChartMismatch { kind: "classification", expected: Chart::BlI, got: other });
        }
    };
    if future {
        Ok((*state, *integrals))
    } else {
        let flipped = GeodesicState { sign_r: -state.sign_r, sign_theta: -state.sign_theta, ..*state };
        Ok((flipped, integrals.reversed()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_uses_interval_notation() {
        let t = GeodesicType { start: Endpoint::Infinity, end: Endpoint::Horizon(Horizon::Outer), block: Block::MI };
        assert_eq!(t.to_string(), "]∞→r+]");
        let s = GeodesicType {
            start: Endpoint::CrossingSphere(Horizon::Outer),
            end: Endpoint::Horizon(Horizon::Inner),
            block: Block::MII,
        };
        assert_eq!(s.to_string(), "[S(r+)→r-]");
        let o = GeodesicType { start: Endpoint::SphericalOrbit, end: Endpoint::SphericalOrbit, block: Block::MI };
        assert_eq!(o.to_string(), "[r0]");
    }

    #[test]
    fn schwarzschild_radial_ray() {
        let p = KerrParams::new(1.0, 0.0).unwrap();
        let it = FirstIntegrals::new(1.0, 0.0, 0.0);
        let out = classify(&p, &it, &StartCondition { block: Block::MI, r: 10.0, sign_r: 1.0 }).unwrap();
        assert_eq!(out.to_string(), "[r+→∞[");
        let inw = classify(&p, &it, &StartCondition { block: Block::MI, r: 10.0, sign_r: -1.0 }).unwrap();
        assert_eq!(inw.to_string(), "]∞→r+]");
    }

    #[test]
    fn scattering_orbit_bounces() {
        let p = KerrParams::new(1.0, 0.0).unwrap();
        // b^2 = 30 > 27: turning point outside the photon sphere
        let it = FirstIntegrals::new(1.0, 30f64.sqrt(), 0.0);
        let t = classify(&p, &it, &StartCondition { block: Block::MI, r: 20.0, sign_r: -1.0 }).unwrap();
        assert_eq!((t.start, t.end), (Endpoint::Infinity, Endpoint::Infinity));
    }
}
