use serde::{Deserialize, Serialize};

use super::surfaces::{Surface, SurfaceSpec};
use crate::error::Result;
use crate::geodesics::GeodesicPath;
use crate::geometry::KerrParams;
use crate::photon_orbits::radial_roots;

/// Stand-in for an infinite supremum or infimum, in units of `M`.
pub const DIVERGENCE_THRESHOLD: f64 = 1e3;
/// Smallest `|du / d ln|r - r_lim||` (units of `M`) read as logarithmic
/// divergence. A `u` with a finite limit has a slope of order `|r - r_lim|`.
pub const LOG_SLOPE_MIN: f64 = 1e-2;
/// Ends closer than this to a horizon or double root are extrapolated.
const NEAR_END: f64 = 1e-3;

/// Behaviour of `u` at one end of a path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndEstimate {
    /// Last sampled value, in units of `M`.
    pub sampled: f64,
    /// Radius the end approaches, if it is a horizon or double root.
    pub limit_radius: Option<f64>,
    /// `du / d ln|r - r_lim|` fitted near the end.
    pub log_slope: Option<f64>,
    /// `+1` or `-1` if `u` diverges logarithmically at this end.
    pub log_divergence: Option<f64>,
    /// Distance `|r - r_lim|` at which the fit reaches the threshold.
    pub threshold_distance: Option<f64>,
}

impl EndEstimate {
    fn reaches(&self, sign: f64) -> bool {
        self.sampled * sign > DIVERGENCE_THRESHOLD || self.log_divergence == Some(sign)
    }
}

/// How a geodesic path meets the level set `u = 0`. Values of `u` are in
/// units of `M` except for `SigmaM`, where `u` is dimensionless.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingReport {
    pub spec: SurfaceSpec,
    pub threshold: f64,
    /// Samples at which `u` could be evaluated.
    pub evaluated: usize,
    /// Samples outside the surface's region.
    pub skipped: usize,
    pub sup_u: f64,
    pub inf_u: f64,
    pub past: Option<EndEstimate>,
    pub future: Option<EndEstimate>,
    pub sup_diverges: bool,
    pub inf_diverges: bool,
    pub sign_changes: usize,
    pub enters_both: bool,
    /// The path ran out of budget; the report is not a verdict.
    pub incomplete: bool,
}

impl CrossingReport {
    pub fn crosses_once(&self) -> bool {
        !self.incomplete && self.sign_changes == 1 && self.enters_both
    }
}

fn end_estimate(rs: &[f64], us: &[f64], candidates: &[f64]) -> EndEstimate {
    let sampled = *us.last().expect("non-empty");
    let r_end = *rs.last().expect("non-empty");
    let mut out =
        EndEstimate { sampled, limit_radius: None, log_slope: None, log_divergence: None, threshold_distance: None };
    let Some(c) = candidates
        .iter()
        .copied()
        .min_by(|a, b| (r_end - a).abs().total_cmp(&(r_end - b).abs()))
    else {
        return out;
    };
    let d_end = (r_end - c).abs();
    if d_end > NEAR_END || d_end == 0.0 {
        return out;
    }
    out.limit_radius = Some(c);
    // least squares of u against ln d over the samples within three decades
    let pts: Vec<(f64, f64)> = rs
        .iter()
        .zip(us)
        .rev()
        .take_while(|(r, _)| {
            let d = (**r - c).abs();
            d > 0.0 && d <= 1e3 * d_end
        })
        .map(|(r, u)| ((r - c).abs().ln(), *u))
        .collect();
    if pts.len() < 3 {
        return out;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return out;
    }
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    out.log_slope = Some(slope);
    if slope.abs() >= LOG_SLOPE_MIN {
        // u grows toward the end when it increases as ln d decreases
        let sign = -slope.signum();
        out.log_divergence = Some(sign);
        out.threshold_distance = Some(d_end * ((sign * DIVERGENCE_THRESHOLD - sampled) / slope).exp());
    }
    out
}

/// Evaluates `u` along a path and summarises how it meets `u = 0`. Samples
/// outside the surface's region are skipped. At ends approaching a horizon or
/// a double root of `R`, `u` is fitted against `ln|r - r_lim|`; a slope of at
/// least [`LOG_SLOPE_MIN`] counts as divergence.
pub fn crossing_report(params: &KerrParams, spec: SurfaceSpec, path: &GeodesicPath) -> Result<CrossingReport> {
    let surface = Surface::new(params, spec)?;
    crossing_report_with(&surface, path)
}

pub fn crossing_report_with(surface: &Surface, path: &GeodesicPath) -> Result<CrossingReport> {
    let m = surface.params.mass;
    let scale = if surface.spec == SurfaceSpec::SigmaM { 1.0 } else { m };
    let mut rs = Vec::with_capacity(path.samples.len());
    let mut us = Vec::with_capacity(path.samples.len());
    let mut skipped = 0;
    for s in &path.samples {
        match surface.value(&s.point) {
            Ok(u) if u.is_finite() => {
                rs.push(s.point.coords[1] / m);
                us.push(u / scale);
            }
            _ => skipped += 1,
        }
    }
    let mut candidates = vec![surface.profiles.rp, surface.profiles.rm];
    candidates.extend(radial_roots(&surface.params, &path.integrals).double_roots().into_iter().map(|r| r / m));

    let incomplete = path.is_incomplete();
    if us.is_empty() {
        return Ok(CrossingReport {
            spec: surface.spec,
            threshold: DIVERGENCE_THRESHOLD,
            evaluated: 0,
            skipped,
            sup_u: f64::NAN,
            inf_u: f64::NAN,
            past: None,
            future: None,
            sup_diverges: false,
            inf_diverges: false,
            sign_changes: 0,
            enters_both: false,
            incomplete,
        });
    }
    let sup_u = us.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let inf_u = us.iter().copied().fold(f64::INFINITY, f64::min);
    let future = end_estimate(&rs, &us, &candidates);
    let rev_r: Vec<f64> = rs.iter().rev().copied().collect();
    let rev_u: Vec<f64> = us.iter().rev().copied().collect();
    let past = end_estimate(&rev_r, &rev_u, &candidates);
    let mut sign_changes = 0;
    let mut last = 0.0f64;
    for &u in &us {
        if u != 0.0 {
            if last != 0.0 && u.signum() != last.signum() {
                sign_changes += 1;
            }
            last = u;
        }
    }
    Ok(CrossingReport {
        spec: surface.spec,
        threshold: DIVERGENCE_THRESHOLD,
        evaluated: us.len(),
        skipped,
        sup_u,
        inf_u,
        past: Some(past),
        future: Some(future),
        sup_diverges: sup_u > DIVERGENCE_THRESHOLD || future.reaches(1.0) || past.reaches(1.0),
        inf_diverges: inf_u < -DIVERGENCE_THRESHOLD || future.reaches(-1.0) || past.reaches(-1.0),
        sign_changes,
        enters_both: sup_u > 0.0 && inf_u < 0.0,
        incomplete,
    })
}
