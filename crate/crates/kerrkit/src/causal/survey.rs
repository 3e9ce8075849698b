use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::crossing::crossing_report_with;
use super::surfaces::{Surface, SurfaceSpec, KINK_GUARD};
use crate::geodesics::{
    angular_potential, future_oriented, integrate_maximal, radial_potential, FirstIntegrals, GeodesicPath,
    GeodesicState, IntegrationConfig,
};
use crate::geometry::{Chart, SpacetimePoint};
use crate::sampling::Halton;
use crate::KerrParams;

/// Point of the surface's region from a point of the unit 5-cube. Radii are
/// log-spaced toward the horizons; `None` within `2 KINK_GUARD` of a kink.
pub fn region_point(s: &Surface, u: &[f64]) -> Option<SpacetimePoint> {
    let m = s.params.mass;
    let (rp, rm) = (s.profiles.rp, s.profiles.rm);
    let theta = 0.01 + (PI - 0.02) * u[1];
    let t = m * (-50.0 + 100.0 * u[2]);
    let phi = 2.0 * PI * u[3];
    let exterior = |rmin: f64| rmin + 10f64.powf(-6.0 + 9.0 * u[0]);
    let (chart, r1) = match s.spec {
        SurfaceSpec::Z { .. } => {
            let rt = s.r_t?;
            if u[4] < 0.5 {
                (Chart::KerrStar, rm + (rt - rm) * 10f64.powf(-6.0 * u[0]))
            } else {
                (Chart::BlI, exterior(rt))
            }
        }
        // on the level set U = V through the crossing sphere
        SurfaceSpec::SigmaM => {
            let w = if u[0] < 0.02 { 0.0 } else { 10f64.powf(-4.0 + 5.0 * u[0]) };
            let w = if u[4] < 0.5 { -w } else { w };
            return Some(SpacetimePoint::new(Chart::Kbl, [w, w, theta, phi]));
        }
        _ => (Chart::BlI, exterior(rp)),
    };
    if s.kinks.iter().any(|k| (r1 - k).abs() <= 2.0 * KINK_GUARD) {
        return None;
    }
    Some(SpacetimePoint::new(chart, [t, r1 * m, theta, phi]))
}

/// Gradient norms of one surface over quasi-random points of its region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientSurvey {
    pub surface: SurfaceSpec,
    pub points: usize,
    /// Points where `du . g^{-1} du >= 0`.
    pub not_timelike: usize,
    /// Largest norm seen; negative when every gradient is timelike.
    pub max_norm: f64,
    /// Points where a closed-form bound applies.
    pub bounded: usize,
    pub bound_violations: usize,
    /// Smallest `bound - norm` over bounded points.
    pub min_bound_margin: f64,
    pub errors: usize,
    pub first_failure: Option<String>,
}

impl GradientSurvey {
    pub fn passed(&self) -> bool {
        self.not_timelike == 0 && self.bound_violations == 0 && self.errors == 0
    }
}

/// Evaluates `points` gradients starting at Halton index `skip`. A bound
/// holds when `norm <= bound + slack * max(1, scale)`, where `scale` is the
/// sum of the moduli of the terms of the norm.
pub fn gradient_survey(s: &Surface, points: usize, skip: u64, slack: f64) -> GradientSurvey {
    let mut out = GradientSurvey {
        surface: s.spec,
        points: 0,
        not_timelike: 0,
        max_norm: f64::NEG_INFINITY,
        bounded: 0,
        bound_violations: 0,
        min_bound_margin: f64::INFINITY,
        errors: 0,
        first_failure: None,
    };
    let fail = |out: &mut GradientSurvey, msg: String| {
        if out.first_failure.is_none() {
            out.first_failure = Some(msg);
        }
    };
    for u in Halton::new(5, skip) {
        if out.points == points {
            break;
        }
        let Some(pt) = region_point(s, &u) else { continue };
        out.points += 1;
        let checked = (|| {
            let norm = s.gradient_norm(&pt)?;
            let bound = s.gradient_bound(&pt)?;
            let scale = s.gradient_scale(&pt)?;
            Ok::<_, crate::KerrError>((norm, bound, scale))
        })();
        let (norm, bound, scale) = match checked {
            Ok(v) => v,
            Err(e) => {
                out.errors += 1;
                fail(&mut out, format!("{:?}: {e}", pt.coords));
                continue;
            }
        };
        out.max_norm = out.max_norm.max(norm);
        if !(norm < 0.0) {
            out.not_timelike += 1;
            fail(&mut out, format!("{:?}: norm {norm:e}", pt.coords));
        }
        if let Some(b) = bound {
            out.bounded += 1;
            out.min_bound_margin = out.min_bound_margin.min(b - norm);
            if norm > b + slack * scale.max(1.0) {
                out.bound_violations += 1;
                fail(&mut out, format!("{:?}: norm {norm:e} above bound {b:e}", pt.coords));
            }
        }
    }
    out
}

/// Paths from quasi-random starts in `M_I`, with the starts that could not be
/// integrated counted separately.
#[derive(Debug, Clone)]
pub struct PathBatch {
    pub paths: Vec<GeodesicPath>,
    pub failed: usize,
}

/// Maximal future-directed null geodesics through quasi-random points of
/// `M_I`: `E` is 1 (or 0 for a tenth of the starts), `L/M` in `[-6, 6]`,
/// `Q/M^2` in `[-1, 30]`, `r - r+` in `[0.02, 12.02] M`, starting at `t = -5M`.
pub fn sample_paths(params: &KerrParams, count: usize, skip: u64, config: &IntegrationConfig) -> PathBatch {
    let m = params.mass;
    let rp = params.r_plus();
    let mut out = PathBatch { paths: Vec::with_capacity(count), failed: 0 };
    for u in Halton::new(6, skip).take(200 * count.max(1)) {
        if out.paths.len() == count {
            break;
        }
        let e = if u[5] < 0.1 { 0.0 } else { 1.0 };
        let it = FirstIntegrals::new(e, m * (-6.0 + 12.0 * u[0]), m * m * (-1.0 + 31.0 * u[1]));
        if it.validate(params).is_err() {
            continue;
        }
        let r = rp + m * (0.02 + 12.0 * u[2] * u[2]);
        let theta = 0.1 + (PI - 0.2) * u[3];
        let scale = it.scale(params);
        if radial_potential(params, &it, r) <= 1e-6 * scale * r * r
            || angular_potential(params, &it, theta) <= 1e-6 * scale
        {
            continue;
        }
        let start = SpacetimePoint::new(Chart::BlI, [-5.0 * m, r, theta, 0.0]);
        let st = GeodesicState::new(start, if u[4] < 0.5 { -1.0 } else { 1.0 }, 1.0);
        let path = future_oriented(params, &it, &st).and_then(|(fs, fi)| integrate_maximal(params, &fs, &fi, config));
        match path {
            Ok(p) => out.paths.push(p),
            Err(_) => out.failed += 1,
        }
    }
    out
}

/// How a batch of paths meets one surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingTally {
    pub surface: SurfaceSpec,
    pub paths: usize,
    /// Complete paths crossing exactly once into both sides.
    pub once: usize,
    /// Paths cut short by the budget, without a second crossing.
    pub incomplete: usize,
    /// Paths changing sign more than once.
    pub multiple: usize,
    /// Complete paths that never reach one side.
    pub missed: usize,
    pub errors: usize,
}

impl CrossingTally {
    pub fn once_fraction(&self) -> f64 {
        if self.paths == 0 {
            0.0
        } else {
            self.once as f64 / self.paths as f64
        }
    }

    /// At least `min_fraction` cross once and every other path is incomplete.
    pub fn passed(&self, min_fraction: f64) -> bool {
        self.paths > 0 && self.once_fraction() >= min_fraction && self.multiple == 0 && self.missed == 0 && self.errors == 0
    }
}

pub fn crossing_tally(s: &Surface, paths: &[GeodesicPath]) -> CrossingTally {
    let mut t = CrossingTally { surface: s.spec, paths: paths.len(), once: 0, incomplete: 0, multiple: 0, missed: 0, errors: 0 };
    for p in paths {
        match crossing_report_with(s, p) {
            Err(_) => t.errors += 1,
            Ok(r) if r.sign_changes > 1 => t.multiple += 1,
            Ok(r) if r.crosses_once() => t.once += 1,
            Ok(r) if r.incomplete => t.incomplete += 1,
            Ok(_) => t.missed += 1,
        }
    }
    t
}
