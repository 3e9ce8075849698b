use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use super::params::{horizon_quantities, KerrParams};
use crate::error::{KerrError, Result};
use crate::numeric::newton_bisect;

/// Coordinate charts on the Kerr–Kruskal manifold.
///
/// `BlI` covers the exterior block, `BlII` the black-hole interior between
/// the horizons. `KerrStar` is regular across the future horizon and
/// `StarKerr` across the past one; for `r < r+` they describe the black-hole
/// and white-hole interiors respectively. `Kbl` is global.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Chart {
    #[serde(rename = "BL_I")]
    BlI,
    #[serde(rename = "BL_II")]
    BlII,
    KerrStar,
    StarKerr,
    #[serde(rename = "KBL")]
    Kbl,
    ConformalKerrStar,
    ConformalStarKerr,
}

impl Chart {
    pub const ALL: [Chart; 7] = [
        Chart::BlI,
        Chart::BlII,
        Chart::KerrStar,
        Chart::StarKerr,
        Chart::Kbl,
        Chart::ConformalKerrStar,
        Chart::ConformalStarKerr,
    ];

    pub fn coordinate_names(&self) -> [&'static str; 4] {
        match self {
            Chart::BlI | Chart::BlII => ["t", "r", "theta", "phi"],
            Chart::KerrStar => ["t*", "r", "theta", "phi*"],
            Chart::StarKerr => ["*t", "r", "theta", "*phi"],
            Chart::Kbl => ["U", "V", "theta", "phi#"],
            Chart::ConformalKerrStar => ["t*", "w", "theta", "phi*"],
            Chart::ConformalStarKerr => ["*t", "w", "theta", "*phi"],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Chart::BlI => "BL_I",
            Chart::BlII => "BL_II",
            Chart::KerrStar => "KerrStar",
            Chart::StarKerr => "StarKerr",
            Chart::Kbl => "KBL",
            Chart::ConformalKerrStar => "ConformalKerrStar",
            Chart::ConformalStarKerr => "ConformalStarKerr",
        }
    }

    pub fn is_conformal(&self) -> bool {
        matches!(self, Chart::ConformalKerrStar | Chart::ConformalStarKerr)
    }
}

/// A chart label with four coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePoint {
    pub chart: Chart,
    pub coords: [f64; 4],
}

impl SpacetimePoint {
    pub fn new(chart: Chart, coords: [f64; 4]) -> Self {
        SpacetimePoint { chart, coords }
    }

    pub fn theta(&self) -> f64 {
        self.coords[2]
    }
}

/// Largest admissible negative extent of `w` in the conformal charts.
///
/// Starts from `0.05/M` and halves until the conformal metric is Lorentzian
/// (one negative eigenvalue) on a validation grid in `w < 0`.
pub fn conformal_epsilon(params: &KerrParams) -> f64 {
    let mut eps = 0.05 / params.mass;
    'outer: for _ in 0..30 {
        for i in 1..=8 {
            let w = -eps * i as f64 / 8.0;
            for j in 1..8 {
                let theta = PI * j as f64 / 8.0;
                let cov = super::metric::conformal_cov(params, w, theta, 1.0);
                let m = nalgebra::Matrix4::from_fn(|r, c| cov[r][c]);
                let eig = m.symmetric_eigen().eigenvalues;
                let neg = eig.iter().filter(|&&e| e < 0.0).count();
                if neg != 1 {
                    eps *= 0.5;
                    continue 'outer;
                }
            }
        }
        return eps;
    }
    eps
}

/// Check that `point` lies in its chart's validity domain.
pub fn validate_point(params: &KerrParams, point: &SpacetimePoint) -> Result<()> {
    let c = point.coords;
    let bad = |reason| Err(KerrError::OutsideDomain { chart: point.chart, coords: c, reason });
    if c.iter().any(|x| !x.is_finite()) {
        return bad("non-finite coordinate");
    }
    if !(0.0..=PI).contains(&c[2]) {
        return bad("theta outside [0, pi]");
    }
    let rp = params.r_plus();
    let rm = params.r_minus();
    match point.chart {
        Chart::BlI => {
            if c[1] <= rp {
                return bad("BL_I requires r > r+");
            }
        }
        Chart::BlII => {
            if c[1] <= rm || c[1] >= rp {
                return bad("BL_II requires r- < r < r+");
            }
        }
        Chart::KerrStar | Chart::StarKerr => {
            if c[1] <= rm {
                return bad("requires r > r-");
            }
        }
        Chart::Kbl => {}
        Chart::ConformalKerrStar | Chart::ConformalStarKerr => {
            if c[1] > 1.0 / rp * (1.0 + 1e-15) {
                return bad("conformal charts require w <= 1/r+");
            }
            if c[1] <= -conformal_epsilon(params) {
                return bad("conformal charts require w > -eps0");
            }
        }
    }
    Ok(())
}

/// Radial profiles entering the chart transitions.
#[derive(Debug, Clone, Copy)]
pub struct RadialFunctions {
    pub rp: f64,
    pub rm: f64,
    pub a: f64,
    pub kappa: f64,
    pub omega_h: f64,
    /// residues of (r^2+a^2)/Delta at r+ and r-
    amp_p: f64,
    amp_m: f64,
    lam_coef: f64,
    h_coef: f64,
}

impl RadialFunctions {
    pub fn new(params: &KerrParams) -> Self {
        let h = horizon_quantities(params).expect("validated params");
        let (rp, rm, a) = (h.r_plus, h.r_minus, params.spin);
        let amp_p = (rp * rp + a * a) / (rp - rm);
        let amp_m = (rm * rm + a * a) / (rm - rp);
        let lam_coef = a / (rp - rm);
        RadialFunctions {
            rp,
            rm,
            a,
            kappa: h.kappa_plus,
            omega_h: h.omega_h,
            amp_p,
            amp_m,
            lam_coef,
            h_coef: h.omega_h * amp_m + lam_coef,
        }
    }

    fn ln_m(&self, r: f64) -> f64 {
        if self.amp_m == 0.0 && self.lam_coef == 0.0 {
            0.0
        } else {
            (r - self.rm).abs().ln()
        }
    }

    /// Tortoise-type coordinate with dx/dr = (r^2+a^2)/Delta.
    pub fn x(&self, r: f64) -> f64 {
        let lm = if self.amp_m == 0.0 { 0.0 } else { self.amp_m * self.ln_m(r) };
        r + self.amp_p * (r - self.rp).abs().ln() + lm
    }

    /// Azimuthal shift with dLambda/dr = a/Delta.
    pub fn lambda(&self, r: f64) -> f64 {
        if self.lam_coef == 0.0 {
            return 0.0;
        }
        self.lam_coef * ((r - self.rp).abs().ln() - self.ln_m(r))
    }

    /// `Omega_H x(r) - Lambda(r)`, regular across r+.
    pub fn h(&self, r: f64) -> f64 {
        let lm = if self.h_coef == 0.0 { 0.0 } else { self.h_coef * self.ln_m(r) };
        self.omega_h * r + lm
    }

    /// `G(r) = exp(-2 kappa_+ r) (r - r-)^(r-/r+)`.
    pub fn g(&self, r: f64) -> f64 {
        let e = if self.rm == 0.0 { 1.0 } else { (r - self.rm).powf(self.rm / self.rp) };
        (-2.0 * self.kappa * r).exp() * e
    }

    pub fn dg(&self, r: f64) -> f64 {
        let q = if self.rm == 0.0 { 0.0 } else { self.rm / self.rp / (r - self.rm) };
        self.g(r) * (-2.0 * self.kappa + q)
    }

    /// `exp(kappa_+ x(r)) = sqrt(|r - r+| / G(r))`.
    pub fn exp_kappa_x(&self, r: f64) -> f64 {
        ((r - self.rp).abs() / self.g(r)).sqrt()
    }

    /// Solve `(r - r+) / (U V) = G(r)` for `r`.
    pub fn r_from_uv(&self, u: f64, v: f64) -> Result<f64> {
        let p = u * v;
        if p == 0.0 {
            return Ok(self.rp);
        }
        let f = |r: f64| (r - self.rp - p * self.g(r), 1.0 - p * self.dg(r));
        let fail = || KerrError::RootNotBracketed { u, v };
        let r = if p > 0.0 {
            let mut hi = self.rp + p * self.g(self.rp).max(1e-300) + 1.0;
            let mut n = 0;
            while f(hi).0 <= 0.0 {
                hi = self.rp + 2.0 * (hi - self.rp);
                n += 1;
                if n > 200 {
                    return Err(fail());
                }
            }
            if p.abs() > 1.0 {
                // logarithmic form is better scaled far from the horizon
                let lnp = p.ln();
                let fl = |r: f64| {
                    let ln_ratio = (r - self.rp).ln() - self.g(r).ln();
                    let d = 1.0 / (r - self.rp) - self.dg(r) / self.g(r);
                    (ln_ratio - lnp, d)
                };
                newton_bisect(fl, self.rp + 1e-300_f64.max((hi - self.rp) * 1e-300), hi, 1e-16, 400)
                    .map_err(|_| fail())?
            } else {
                newton_bisect(f, self.rp, hi, 1e-16, 400).map_err(|_| fail())?
            }
        } else {
            let lo = self.rm + (self.rp - self.rm) * 1e-300;
            if f(lo).0 >= 0.0 {
                // r is squeezed against r-: logarithmic form
                let lnp = (-p).ln();
                let fl = |r: f64| {
                    let ln_ratio = (self.rp - r).ln() - self.g(r).ln();
                    let d = -1.0 / (self.rp - r) - self.dg(r) / self.g(r);
                    (ln_ratio - lnp, d)
                };
                let hi = self.rp - (self.rp - self.rm) * 1e-16;
                newton_bisect(fl, self.rm + f64::EPSILON * self.rm.max(1e-300), hi, 1e-16, 400)
                    .map_err(|_| fail())?
            } else {
                newton_bisect(f, lo, self.rp, 1e-16, 400).map_err(|_| fail())?
            }
        };
        let resid = r - self.rp - p * self.g(r);
        if resid.abs() > 1e-12 * (1.0 + self.rp) {
            return Err(fail());
        }
        Ok(r)
    }
}

/// Targets of [`transition`]: another chart, or the wedge reflection of KBL.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transition {
    To(Chart),
    WedgeReflection,
}

fn wrap_angle(x: f64) -> f64 {
    x.rem_euclid(TAU)
}

/// `(U, V, theta, phi#) -> (-U, -V, theta, phi#)`.
pub fn wedge_reflection(point: &SpacetimePoint) -> Result<SpacetimePoint> {
    if point.chart != Chart::Kbl {
        return Err(KerrError::ChartMismatch {
            kind: "wedge reflection",
            expected: Chart::Kbl,
            got: point.chart,
        });
    }
    let c = point.coords;
    Ok(SpacetimePoint::new(Chart::Kbl, [-c[0], -c[1], c[2], c[3]]))
}

/// Which time/azimuth pair a non-KBL chart uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slicing {
    Bl,
    Ks,
    Sk,
}

struct Local {
    slicing: Slicing,
    time: f64,
    r: f64,
    theta: f64,
    az: f64,
}

fn to_local(point: &SpacetimePoint) -> Local {
    let c = point.coords;
    let (slicing, r) = match point.chart {
        Chart::BlI | Chart::BlII => (Slicing::Bl, c[1]),
        Chart::KerrStar => (Slicing::Ks, c[1]),
        Chart::StarKerr => (Slicing::Sk, c[1]),
        Chart::ConformalKerrStar => (Slicing::Ks, 1.0 / c[1]),
        Chart::ConformalStarKerr => (Slicing::Sk, 1.0 / c[1]),
        Chart::Kbl => unreachable!("KBL handled separately"),
    };
    Local { slicing, time: c[0], r, theta: c[2], az: c[3] }
}

/// Map a point into `to_chart`; azimuths are reduced mod 2 pi.
pub fn chart_map(params: &KerrParams, from: &SpacetimePoint, to_chart: Chart) -> Result<SpacetimePoint> {
    let mut out = chart_map_unwrapped(params, from, to_chart)?;
    out.coords[3] = wrap_angle(out.coords[3]);
    Ok(out)
}

pub fn transition(params: &KerrParams, from: &SpacetimePoint, target: Transition) -> Result<SpacetimePoint> {
    match target {
        Transition::To(c) => chart_map(params, from, c),
        Transition::WedgeReflection => wedge_reflection(from),
    }
}

/// As [`chart_map`] but without reducing the azimuth (for finite differences).
pub fn chart_map_unwrapped(
    params: &KerrParams,
    from: &SpacetimePoint,
    to_chart: Chart,
) -> Result<SpacetimePoint> {
    params.validate()?;
    validate_point(params, from)?;
    if from.chart == to_chart {
        return Ok(*from);
    }
    let rf = RadialFunctions::new(params);
    let overlap = || KerrError::OutsideOverlap { from: from.chart, to: to_chart, coords: from.coords };
    let out = if to_chart == Chart::Kbl {
        to_kbl(&rf, from)?
    } else if from.chart == Chart::Kbl {
        from_kbl(&rf, from, to_chart).ok_or_else(overlap)??
    } else {
        let loc = to_local(from);
        local_to_chart(&rf, &loc, from.chart, to_chart).ok_or_else(overlap)?
    };
    validate_point(params, &out).map_err(|_| overlap())?;
    Ok(out)
}

/// Is `r` on the interior side of the future (KS) or past (SK) horizon?
fn block_of(rf: &RadialFunctions, chart: Chart, r: f64) -> i8 {
    // 0: exterior, 1: black-hole interior, -1: white-hole interior, 2: horizon
    if r > rf.rp {
        0
    } else if r == rf.rp {
        2
    } else {
        match chart {
            Chart::BlII | Chart::KerrStar | Chart::ConformalKerrStar => 1,
            _ => -1,
        }
    }
}

fn local_to_chart(rf: &RadialFunctions, loc: &Local, from: Chart, to: Chart) -> Option<SpacetimePoint> {
    let from_block = block_of(rf, from, loc.r);
    let target_slicing = match to {
        Chart::BlI | Chart::BlII => Slicing::Bl,
        Chart::KerrStar | Chart::ConformalKerrStar => Slicing::Ks,
        Chart::StarKerr | Chart::ConformalStarKerr => Slicing::Sk,
        Chart::Kbl => unreachable!(),
    };
    let to_block = match to {
        Chart::BlI => 0,
        Chart::BlII => 1,
        _ => block_of(rf, to, loc.r),
    };
    if from_block == 2 || to_block == 2 {
        // horizon points only survive within the same slicing
        if from_block != to_block || loc.slicing != target_slicing {
            return None;
        }
    } else if from_block != to_block {
        return None;
    }
    // bring time and azimuth to BL first
    let (x, lam) = if from_block == 2 { (0.0, 0.0) } else { (rf.x(loc.r), rf.lambda(loc.r)) };
    let (t, phi) = match loc.slicing {
        Slicing::Bl => (loc.time, loc.az),
        Slicing::Ks => (loc.time - x, loc.az - lam),
        Slicing::Sk => (loc.time + x, loc.az + lam),
    };
    let (time, az) = match target_slicing {
        Slicing::Bl => (t, phi),
        Slicing::Ks => (t + x, phi + lam),
        Slicing::Sk => (t - x, phi - lam),
    };
    let (time, az) = if loc.slicing == target_slicing { (loc.time, loc.az) } else { (time, az) };
    let second = if to.is_conformal() { 1.0 / loc.r } else { loc.r };
    Some(SpacetimePoint::new(to, [time, second, loc.theta, az]))
}

fn to_kbl(rf: &RadialFunctions, from: &SpacetimePoint) -> Result<SpacetimePoint> {
    let loc = to_local(from);
    let (r, theta) = (loc.r, loc.theta);
    let k = rf.kappa;
    let block = block_of(rf, from.chart, r);
    let sep = r - rf.rp;
    let g = rf.g(r);
    let (u, v, phis) = match loc.slicing {
        Slicing::Bl => {
            let ekx = rf.exp_kappa_x(r);
            let u_mag = (-k * loc.time).exp() * ekx;
            let v_mag = (k * loc.time).exp() * ekx;
            let u = if block == 0 { u_mag } else { -u_mag };
            (u, v_mag, loc.az - rf.omega_h * loc.time)
        }
        Slicing::Ks => {
            let v = (k * loc.time).exp();
            let u = sep / (g * v);
            (u, v, loc.az - rf.omega_h * loc.time + rf.h(r))
        }
        Slicing::Sk => {
            let u = (-k * loc.time).exp();
            let v = sep / (g * u);
            (u, v, loc.az - rf.omega_h * loc.time - rf.h(r))
        }
    };
    Ok(SpacetimePoint::new(Chart::Kbl, [u, v, theta, phis]))
}

fn from_kbl(rf: &RadialFunctions, from: &SpacetimePoint, to: Chart) -> Option<Result<SpacetimePoint>> {
    let [u, v, theta, phis] = from.coords;
    let r = match rf.r_from_uv(u, v) {
        Ok(r) => r,
        Err(e) => return Some(Err(e)),
    };
    let k = rf.kappa;
    let second = |r: f64| if to.is_conformal() { 1.0 / r } else { r };
    let p = match to {
        Chart::BlI | Chart::BlII => {
            let ok = if to == Chart::BlI { u > 0.0 && v > 0.0 } else { u < 0.0 && v > 0.0 };
            if !ok {
                return None;
            }
            let t = (v / u.abs()).ln() / (2.0 * k);
            SpacetimePoint::new(to, [t, r, theta, phis + rf.omega_h * t])
        }
        Chart::KerrStar | Chart::ConformalKerrStar => {
            if v <= 0.0 {
                return None;
            }
            let ts = v.ln() / k;
            SpacetimePoint::new(to, [ts, second(r), theta, phis + rf.omega_h * ts - rf.h(r)])
        }
        Chart::StarKerr | Chart::ConformalStarKerr => {
            if u <= 0.0 {
                return None;
            }
            let st = -u.ln() / k;
            SpacetimePoint::new(to, [st, second(r), theta, phis + rf.omega_h * st + rf.h(r)])
        }
        Chart::Kbl => *from,
    };
    Some(Ok(p))
}

/// Numeric Jacobian `d(to)/d(from)` by centred differences with step `h`
/// (azimuth differences are unwrapped).
pub fn transition_jacobian(
    params: &KerrParams,
    from: &SpacetimePoint,
    to_chart: Chart,
    h: f64,
) -> Result<[[f64; 4]; 4]> {
    let mut jac = [[0.0; 4]; 4];
    for j in 0..4 {
        let step = h * (1.0 + from.coords[j].abs());
        let mut p = *from;
        let mut m = *from;
        p.coords[j] += step;
        m.coords[j] -= step;
        let fp = chart_map_unwrapped(params, &p, to_chart)?;
        let fm = chart_map_unwrapped(params, &m, to_chart)?;
        for i in 0..4 {
            let mut d = fp.coords[i] - fm.coords[i];
            if i == 3 {
                d = (d + PI).rem_euclid(TAU) - PI;
            }
            jac[i][j] = d / (2.0 * step);
        }
    }
    Ok(jac)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> KerrParams {
        KerrParams::new(1.0, 0.3).unwrap()
    }

    #[test]
    fn tortoise_derivatives_match_closed_forms() {
        let p = params();
        let rf = RadialFunctions::new(&p);
        for r in [2.5, 4.0, 10.0, 1.2, 0.5] {
            if (r - rf.rp).abs() < 0.05 || (r - rf.rm).abs() < 0.05 {
                continue;
            }
            let h = 1e-5;
            let dx = (rf.x(r + h) - rf.x(r - h)) / (2.0 * h);
            let dl = (rf.lambda(r + h) - rf.lambda(r - h)) / (2.0 * h);
            let d = p.delta(r);
            assert!((dx - (r * r + 0.09) / d).abs() < 1e-6 * dx.abs());
            assert!((dl - 0.3 / d).abs() < 1e-6 * (0.3 / d).abs());
        }
    }

    #[test]
    fn h_matches_definition_off_horizon() {
        let rf = RadialFunctions::new(&params());
        for r in [1.0, 3.0, 7.0] {
            assert!((rf.h(r) - (rf.omega_h * rf.x(r) - rf.lambda(r))).abs() < 1e-12);
        }
    }

    #[test]
    fn uv_product_is_exp_two_kappa_x() {
        let p = params();
        let rf = RadialFunctions::new(&p);
        let bl = SpacetimePoint::new(Chart::BlI, [0.0, 4.0, 1.0, 0.5]);
        let k = chart_map(&p, &bl, Chart::Kbl).unwrap();
        let uv = k.coords[0] * k.coords[1];
        let expect = (2.0 * rf.kappa * rf.x(4.0)).exp();
        assert!((uv - expect).abs() < 1e-10 * expect);
    }

    #[test]
    fn horizon_uv_gives_r_plus() {
        let rf = RadialFunctions::new(&params());
        assert_eq!(rf.r_from_uv(0.0, 3.0).unwrap(), rf.rp);
        assert_eq!(rf.r_from_uv(-2.0, 0.0).unwrap(), rf.rp);
    }

    #[test]
    fn bl_kerr_star_round_trip() {
        let p = params();
        let bl = SpacetimePoint::new(Chart::BlI, [3.0, 5.0, 0.7, 1.0]);
        let ks = chart_map(&p, &bl, Chart::KerrStar).unwrap();
        let back = chart_map(&p, &ks, Chart::BlI).unwrap();
        for i in 0..4 {
            assert!((back.coords[i] - bl.coords[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn wedge_reflection_is_involution() {
        let k = SpacetimePoint::new(Chart::Kbl, [0.3, -1.2, 1.0, 2.0]);
        let r2 = wedge_reflection(&wedge_reflection(&k).unwrap()).unwrap();
        assert_eq!(r2, k);
    }

    #[test]
    fn blocks_are_respected() {
        let p = params();
        let inside = SpacetimePoint::new(Chart::StarKerr, [0.0, 1.5, 1.0, 0.0]);
        assert!(chart_map(&p, &inside, Chart::BlII).is_err());
        let inside = SpacetimePoint::new(Chart::KerrStar, [0.0, 1.5, 1.0, 0.0]);
        assert!(chart_map(&p, &inside, Chart::BlII).is_ok());
        let m1p = SpacetimePoint::new(Chart::Kbl, [-1.0, -1.0, 1.0, 0.0]);
        assert!(matches!(chart_map(&p, &m1p, Chart::BlI), Err(KerrError::OutsideOverlap { .. })));
    }
}
