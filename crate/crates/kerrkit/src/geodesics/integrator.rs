use serde::{Deserialize, Serialize};

use super::classify::{Block, Endpoint, GeodesicType, Horizon};
use super::integrals::{
    angular_potential, angular_potential_derivative, chart_shift, p_function, radial_potential,
    radial_potential_derivative, radial_scale, rates, recover, FirstIntegrals,
};
use crate::error::{KerrError, Result};
use crate::geometry::{validate_point, Chart, KerrParams, RadialFunctions, SpacetimePoint};
use crate::numeric::dopri5_step;
use crate::photon_orbits::radial_roots;

/// Initial data: a point with the signs of `dr/ds` and `dtheta/ds`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicState {
    pub point: SpacetimePoint,
    pub sign_r: f64,
    pub sign_theta: f64,
    pub affine: f64,
}

impl GeodesicState {
    pub fn new(point: SpacetimePoint, sign_r: f64, sign_theta: f64) -> Self {
        GeodesicState { point, sign_r, sign_theta, affine: 0.0 }
    }
}

/// Integration controls. Lengths are in units of `M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegrationConfig {
    pub rtol: f64,
    /// Affine budget.
    pub max_affine: f64,
    pub max_steps: usize,
    /// Escape radius.
    pub r_max: f64,
    /// Closest approach to a horizon in Boyer–Lindquist coordinates.
    pub horizon_standoff: f64,
    /// Distance to a double root that ends the integration.
    pub double_root_delta: f64,
    /// Distance from `r_+` at which the path is moved to the Kerr-star chart.
    pub switch_distance: f64,
    /// Continue through the future horizon between `M_I` and `M_II`.
    pub cross_future_horizon: bool,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        IntegrationConfig {
            rtol: 1e-13,
            max_affine: 1e5,
            max_steps: 2_000_000,
            r_max: 1e3,
            horizon_standoff: 1e-8,
            double_root_delta: 1e-5,
            switch_distance: 1e-3,
            cross_future_horizon: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    HorizonCrossing,
    Escape,
    TurningPointR,
    TurningPointTheta,
    DoubleRootApproach,
    AxisApproach,
    Incomplete,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathEvent {
    pub kind: EventKind,
    pub affine: f64,
    pub r: f64,
    /// Whether the event ended the integration.
    pub terminal: bool,
}

/// One accepted step. `velocity` is in the chart of `point`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub affine: f64,
    pub point: SpacetimePoint,
    pub velocity: [f64; 4],
    pub block: Block,
    /// Relative drift of `E` and `L` recomputed from the velocity.
    pub e_drift: f64,
    pub l_drift: f64,
    /// Relative drift of `K` recomputed from `theta-dot`.
    pub k_drift: f64,
    /// `|g(v, v)|` over the sum of the moduli of its terms.
    pub null_drift: f64,
    /// `|rho^4 rdot^2 - R| / (1 + |R|)` in units `M = 1`, `E ~ 1`.
    pub radial_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicPath {
    pub integrals: FirstIntegrals,
    pub samples: Vec<PathSample>,
    pub events: Vec<PathEvent>,
    /// Past endpoint, known only for paths integrated in both directions.
    pub start: Option<Endpoint>,
    /// Future endpoint; `None` when the budget ran out.
    pub end: Option<Endpoint>,
    pub block: Block,
}

impl GeodesicPath {
    pub fn geodesic_type(&self) -> Option<GeodesicType> {
        Some(GeodesicType { start: self.start?, end: self.end?, block: self.block })
    }

    pub fn max_drift(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.e_drift.max(s.l_drift).max(s.k_drift).max(s.null_drift))
            .fold(0.0, f64::max)
    }

    pub fn max_radial_residual(&self) -> f64 {
        self.samples.iter().map(|s| s.radial_residual).fold(0.0, f64::max)
    }

    pub fn is_incomplete(&self) -> bool {
        self.events.iter().any(|e| e.kind == EventKind::Incomplete)
    }
}

/// Flat row for CSV export.
#[derive(Debug, Clone, Serialize)]
pub struct PathRow {
    pub affine: f64,
    pub chart: &'static str,
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub v0: f64,
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
    #[serde(rename = "E_drift")]
    pub e_drift: f64,
    #[serde(rename = "K_drift")]
    pub k_drift: f64,
}

impl From<&PathSample> for PathRow {
    fn from(s: &PathSample) -> Self {
        let [x0, x1, x2, x3] = s.point.coords;
        let [v0, v1, v2, v3] = s.velocity;
        PathRow { affine: s.affine, chart: s.point.chart.name(), x0, x1, x2, x3, v0, v1, v2, v3, e_drift: s.e_drift, k_drift: s.k_drift }
    }
}

/// State vector `(tau, r, theta, psi, u_r, u_theta)` where `(tau, psi)` are
/// the time and azimuth of the current chart and `u = rho^2 (rdot, thetadot)`.
type Y = [f64; 6];

struct System<'a> {
    params: &'a KerrParams,
    it: &'a FirstIntegrals,
    rf: RadialFunctions,
    /// 0 in Boyer–Lindquist, +1 Kerr-star.
    h: f64,
    block: Block,
    /// Started on a double root of `R`: the orbit `r = r0` is followed and
    /// its instability is not resolved.
    spherical: bool,
}

impl System<'_> {
    fn admissible_r(&self, r: f64) -> bool {
        let (rp, rm) = (self.rf.rp, self.rf.rm);
        if self.h != 0.0 {
            return r > rm;
        }
        match self.block {
            Block::MI => r > rp,
            Block::MII => r > rm && r < rp,
        }
    }

    fn rhs(&self, y: &Y) -> Option<Y> {
        let (r, th, ur, uth) = (y[1], y[2], y[4], y[5]);
        if !self.admissible_r(r) || !r.is_finite() {
            return None;
        }
        if self.it.angular_momentum != 0.0 && th.sin().abs() < 1e-12 {
            return None;
        }
        let v = rates(self.params, self.it, self.h, r, th, ur, uth);
        let rho2 = self.params.rho2(r, th);
        let dur = if self.spherical { 0.0 } else { radial_potential_derivative(self.params, self.it, r) / (2.0 * rho2) };
        let duth = angular_potential_derivative(self.params, self.it, th) / (2.0 * rho2);
        let out = [v[0], v[1], v[2], v[3], dur, duth];
        out.iter().all(|x| x.is_finite()).then_some(out)
    }

    fn chart(&self) -> Chart {
        if self.h != 0.0 {
            Chart::KerrStar
        } else if self.block == Block::MI {
            Chart::BlI
        } else {
            Chart::BlII
        }
    }

    /// Point with `theta` folded into `[0, pi]`, and whether it was reflected
    /// through the axis.
    fn point(&self, y: &Y) -> (SpacetimePoint, bool) {
        let two_pi = 2.0 * std::f64::consts::PI;
        let (mut th, mut ph) = (y[2].rem_euclid(two_pi), y[3]);
        let reflected = th > std::f64::consts::PI;
        if reflected {
            th = two_pi - th;
            ph += std::f64::consts::PI;
        }
        (SpacetimePoint::new(self.chart(), [y[0], y[1], th, ph.rem_euclid(two_pi)]), reflected)
    }

    fn sample(&self, s: f64, y: &Y) -> PathSample {
        let mut velocity = [0, 1, 2, 3].map(|i| self.rhs(y).map(|d| d[i]).unwrap_or(f64::NAN));
        let (point, reflected) = self.point(y);
        if reflected {
            velocity[2] = -velocity[2];
        }
        let (r, th) = (point.coords[1], point.coords[2]);
        let (e0, l0) = (self.it.energy, self.it.angular_momentum);
        let k0 = self.it.k(self.params.spin);
        let m = self.params.mass;
        let tiny = f64::MIN_POSITIVE;
        let scale_el = e0.abs() + l0.abs() / m;
        let scale_k = self.it.scale(self.params);
        // drifts are measured in the star chart that is regular along the path
        let p = p_function(self.params, self.it, r);
        let h_reg = if y[4] * p <= 0.0 { 1.0 } else { -1.0 };
        let chart = if h_reg > 0.0 { Chart::KerrStar } else { Chart::StarKerr };
        let u_th = if reflected { -y[5] } else { y[5] };
        let v_reg = rates(self.params, self.it, h_reg, r, th, y[4], u_th);
        let p_reg = SpacetimePoint::new(chart, [0.0, r, th, 0.0]);
        let (e_drift, l_drift, k_drift, null_drift) = match recover(self.params, &p_reg, &v_reg) {
            Ok((e, l, k, nd)) if th.sin() > 1e-6 => (
                (e - e0).abs() / scale_el.max(tiny),
                (l - l0).abs() / (m * scale_el).max(tiny),
                (k - k0).abs() / scale_k.max(tiny),
                nd,
            ),
            _ => {
                // next to the axis only the angular equation is checked
                let kd = (y[5] * y[5] - angular_potential(self.params, self.it, y[2])).abs() / scale_k.max(tiny);
                (0.0, 0.0, kd, 0.0)
            }
        };
        let rr = radial_potential(self.params, self.it, r);
        // residual measured in M = 1 units relative to the integral scale
        let norm = (m.powi(4) * scale_k).max(tiny);
        let radial_residual = ((y[4] * y[4] - rr) / norm).abs() / (1.0 + (rr / norm).abs());
        PathSample { affine: s, point, velocity, block: self.block_at(r), e_drift, l_drift, k_drift, null_drift, radial_residual }
    }

    fn block_at(&self, r: f64) -> Block {
        if r > self.rf.rp {
            Block::MI
        } else {
            Block::MII
        }
    }

    fn error_norm(&self, y0: &Y, y1: &Y, err: &Y, rtol: f64) -> f64 {
        let m = self.params.mass;
        let us = (self.it.energy.abs() * m * m + self.it.angular_momentum.abs() * m + self.it.carter.abs().sqrt() * m)
            .max(f64::MIN_POSITIVE);
        let typ = [m, m, 1.0, 1.0, us, us];
        let mut worst: f64 = 0.0;
        for i in 0..6 {
            let sc = rtol * (typ[i] + y0[i].abs().max(y1[i].abs()));
            worst = worst.max(err[i].abs() / sc);
        }
        worst
    }

    fn to_kerr_star(&mut self, y: &mut Y) {
        y[0] += self.rf.x(y[1]);
        y[3] += self.rf.lambda(y[1]);
        self.h = 1.0;
    }

    fn to_bl(&mut self, y: &mut Y) {
        y[0] -= self.rf.x(y[1]);
        y[3] -= self.rf.lambda(y[1]);
        self.h = 0.0;
        self.block = self.block_at(y[1]);
    }
}

/// Horizon approached within the current Boyer–Lindquist block, if any:
/// `(radius, +1 from above / -1 from below, horizon)`.
fn approached_horizon(sys: &System, y: &Y) -> Option<(f64, f64, Horizon)> {
    if sys.h != 0.0 {
        return None;
    }
    let ur = y[4];
    match sys.block {
        Block::MI if ur < 0.0 => Some((sys.rf.rp, 1.0, Horizon::Outer)),
        Block::MII if ur > 0.0 => Some((sys.rf.rp, -1.0, Horizon::Outer)),
        Block::MII if ur < 0.0 => Some((sys.rf.rm, 1.0, Horizon::Inner)),
        _ => None,
    }
}

fn initial_vector(params: &KerrParams, state: &GeodesicState, it: &FirstIntegrals) -> Result<(Y, f64, Block)> {
    let p = &state.point;
    let h = chart_shift(p.chart).ok_or(KerrError::ChartMismatch { kind: "integration", expected: Chart::BlI, got: p.chart })?;
    validate_point(params, p)?;
    let [tau, r, th, psi] = p.coords;
    let block = if r > params.r_plus() { Block::MI } else { Block::MII };
    if h < 0.0 && block == Block::MII {
        return Err(KerrError::OutsideDomain { chart: p.chart, coords: p.coords, reason: "star-Kerr interior is not integrated" });
    }
    let rr = radial_potential(params, it, r);
    let th_pot = angular_potential(params, it, th);
    let tol_r = 1e-10 * radial_scale(params, it, r);
    let tol_t = 1e-10 * it.scale(params) / th.sin().powi(2).max(1e-300);
    if rr < -tol_r {
        return Err(KerrError::ForbiddenRegion { which: "R", value: rr });
    }
    if th_pot < -tol_t {
        return Err(KerrError::ForbiddenRegion { which: "Theta", value: th_pot });
    }
    if !(state.sign_r == 1.0 || state.sign_r == -1.0) || !(state.sign_theta == 1.0 || state.sign_theta == -1.0) {
        return Err(KerrError::InvalidArgument("signs must be +1 or -1".into()));
    }
    let ur = if rr <= tol_r { 0.0 } else { state.sign_r * rr.sqrt() };
    let uth = if th_pot <= tol_t { 0.0 } else { state.sign_theta * th_pot.sqrt() };
    Ok(([tau, r, th, psi, ur, uth], h, block))
}

/// Integrates forward in the affine parameter until a terminal event.
pub fn integrate(
    params: &KerrParams,
    initial: &GeodesicState,
    integrals: &FirstIntegrals,
    config: &IntegrationConfig,
) -> Result<GeodesicPath> {
    params.validate()?;
    integrals.validate(params)?;
    let m = params.mass;
    let (mut y, h0, block) = initial_vector(params, initial, integrals)?;
    let roots = radial_roots(params, integrals);
    let doubles: Vec<f64> = roots.double_roots().filter(|&r| r > params.r_plus()).collect();
    let spherical = y[4] == 0.0 && doubles.iter().any(|&r0| (y[1] - r0).abs() <= 1e-9 * m.max(r0));
    let mut sys = System { params, it: integrals, rf: RadialFunctions::new(params), h: h0, block, spherical };
    let start_block = block;
    let standoff = config.horizon_standoff * m;
    let switch = (config.switch_distance * m).min(0.25 * (sys.rf.rp - sys.rf.rm)).max(10.0 * standoff);
    let delta_dr = config.double_root_delta * m;

    let mut s = initial.affine;
    let s_end = initial.affine + config.max_affine * m;
    let mut samples = vec![sys.sample(s, &y)];
    let mut events: Vec<PathEvent> = Vec::new();
    let mut step = 1e-3 * m;
    let mut k1 = sys.rhs(&y).ok_or(KerrError::OutsideDomain {
        chart: initial.point.chart,
        coords: initial.point.coords,
        reason: "right-hand side undefined at the initial point",
    })?;
    let mut near_tau: Option<f64> = None;
    let mut axis_flag = false;
    let mut end: Option<Endpoint> = None;

    for _ in 0..config.max_steps {
        // chart management
        if sys.h != 0.0 && (y[1] - sys.rf.rp).abs() > switch {
            sys.to_bl(&mut y);
            k1 = sys.rhs(&y).ok_or(KerrError::StepUnderflow { affine: s })?;
        }
        if let Some((rh, side, _)) = approached_horizon(&sys, &y) {
            let dist = side * (y[1] - rh);
            if dist < switch && crossing_allowed(&sys, &y, config) {
                sys.to_kerr_star(&mut y);
                k1 = sys.rhs(&y).ok_or(KerrError::StepUnderflow { affine: s })?;
                near_tau = None;
            } else if dist < 1e3 * standoff && near_tau.is_none() {
                near_tau = Some(y[0]);
            }
        }

        if s >= s_end {
            events.push(PathEvent { kind: EventKind::Incomplete, affine: s, r: y[1], terminal: true });
            break;
        }
        let mut hstep = step.min(s_end - s).max(1e-14 * m);
        let target = approached_horizon(&sys, &y);
        let crossing = target.is_some() && crossing_allowed(&sys, &y, config);
        // a crossing path stops short at the switch distance instead of the standoff
        let band = if crossing { 0.5 * switch } else { standoff };
        let beyond = |yn: &Y| -> bool {
            match target {
                Some((rh, side, _)) => side * (yn[1] - rh) < band,
                None => false,
            }
        };

        // attempt a step, shrinking on rejection
        let mut accepted: Option<(Y, Y)> = None;
        for _ in 0..200 {
            match dopri5_step(&|v: &Y| sys.rhs(v), &y, &k1, hstep) {
                Some((yn, err, k7)) => {
                    let e = sys.error_norm(&y, &yn, &err, config.rtol);
                    if e <= 1.0 {
                        accepted = Some((yn, k7));
                        step = hstep * (0.9 * e.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
                        break;
                    }
                    hstep *= (0.9 * e.powf(-0.2)).clamp(0.1, 0.9);
                }
                None => hstep *= 0.25,
            }
            if hstep < 1e-15 * m * (1.0 + s.abs()) {
                break;
            }
        }
        let (mut yn, mut k7) = match accepted {
            Some(v) => v,
            None => {
                if let Some((_, _, hz)) = target {
                    // the path is pinned against the standoff surface
                    events.push(PathEvent { kind: EventKind::HorizonCrossing, affine: s, r: y[1], terminal: true });
                    end = Some(horizon_endpoint(&y, near_tau, hz, m));
                    break;
                }
                return Err(KerrError::StepUnderflow { affine: s });
            }
        };

        let mut hit_standoff = false;
        if beyond(&yn) {
            // shrink the step so the path lands inside the standoff band
            let (rh, side, _) = target.unwrap();
            let (mut lo, mut hi) = (0.0, hstep);
            let mut best: Option<(Y, Y, f64)> = None;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                match dopri5_step(&|v: &Y| sys.rhs(v), &y, &k1, mid) {
                    Some((ym, _, km)) if side * (ym[1] - rh) >= band => {
                        lo = mid;
                        best = Some((ym, km, mid));
                        if side * (ym[1] - rh) < 2.0 * band {
                            break;
                        }
                    }
                    _ => hi = mid,
                }
            }
            match best {
                Some((ym, km, hm)) => {
                    yn = ym;
                    k7 = km;
                    hstep = hm;
                }
                None => {
                    yn = y;
                    k7 = k1;
                    hstep = 0.0;
                }
            }
            hit_standoff = !crossing;
        }

        let s_new = s + hstep;
        if y[4] != 0.0 && yn[4] != 0.0 && y[4].signum() != yn[4].signum() {
            let f = y[4] / (y[4] - yn[4]);
            events.push(PathEvent { kind: EventKind::TurningPointR, affine: s + f * hstep, r: y[1] + f * (yn[1] - y[1]), terminal: false });
        }
        if y[5] != 0.0 && yn[5] != 0.0 && y[5].signum() != yn[5].signum() {
            let f = y[5] / (y[5] - yn[5]);
            events.push(PathEvent { kind: EventKind::TurningPointTheta, affine: s + f * hstep, r: yn[1], terminal: false });
        }
        if sys.h != 0.0 && (y[1] - sys.rf.rp).signum() != (yn[1] - sys.rf.rp).signum() {
            events.push(PathEvent { kind: EventKind::HorizonCrossing, affine: s_new, r: sys.rf.rp, terminal: false });
        }
        let near_axis = yn[2].sin().abs() < 1e-6;
        if near_axis && !axis_flag {
            events.push(PathEvent { kind: EventKind::AxisApproach, affine: s_new, r: yn[1], terminal: false });
        }
        axis_flag = near_axis;

        y = yn;
        k1 = k7;
        s = s_new;
        if hstep > 0.0 {
            samples.push(sys.sample(s, &y));
        }

        if hit_standoff {
            let (_, _, hz) = target.unwrap();
            events.push(PathEvent { kind: EventKind::HorizonCrossing, affine: s, r: y[1], terminal: true });
            end = Some(horizon_endpoint(&y, near_tau, hz, m));
            break;
        }
        if y[1] > config.r_max * m && y[4] > 0.0 {
            events.push(PathEvent { kind: EventKind::Escape, affine: s, r: y[1], terminal: true });
            end = Some(Endpoint::Infinity);
            break;
        }
        if let Some(&r0) = doubles.iter().find(|&&r0| (y[1] - r0).abs() < delta_dr) {
            let initial_r = initial.point.coords[1];
            // a path seeded on the double root is a spherical orbit, not an approach
            if (initial_r - r0).abs() >= delta_dr {
                events.push(PathEvent { kind: EventKind::DoubleRootApproach, affine: s, r: y[1], terminal: true });
                end = Some(Endpoint::DoubleRootAsymptote);
                break;
            }
        }
    }
    if end.is_none() && !events.iter().any(|e| e.kind == EventKind::Incomplete) {
        events.push(PathEvent { kind: EventKind::Incomplete, affine: s, r: y[1], terminal: true });
    }
    Ok(GeodesicPath { integrals: *integrals, samples, events, start: None, end, block: start_block })
}

/// The future horizon from `M_I` into `M_II` is crossed in the Kerr-star chart,
/// which is regular there when `u_r P(r_+) < 0`.
fn crossing_allowed(sys: &System, y: &Y, config: &IntegrationConfig) -> bool {
    if !config.cross_future_horizon || sys.h != 0.0 {
        return false;
    }
    let p_h = p_function(sys.params, sys.it, sys.rf.rp);
    let regular = y[4] * p_h < 0.0;
    let into_interior = sys.block == Block::MI && y[4] < 0.0;
    let out_of_interior = sys.block == Block::MII && y[4] > 0.0;
    regular && (into_interior || out_of_interior)
}

/// Horizon endpoints where `t` stays bounded are crossing spheres.
fn horizon_endpoint(y: &Y, near_tau: Option<f64>, hz: Horizon, m: f64) -> Endpoint {
    match near_tau {
        Some(t0) if (y[0] - t0).abs() < 1e-2 * m => Endpoint::CrossingSphere(hz),
        _ => Endpoint::Horizon(hz),
    }
}

/// Integrates in both affine directions and joins the halves into one path
/// ordered by increasing affine parameter.
pub fn integrate_maximal(
    params: &KerrParams,
    initial: &GeodesicState,
    integrals: &FirstIntegrals,
    config: &IntegrationConfig,
) -> Result<GeodesicPath> {
    let fwd = integrate(params, initial, integrals, config)?;
    let back_state = GeodesicState { point: initial.point, sign_r: -initial.sign_r, sign_theta: -initial.sign_theta, affine: 0.0 };
    let bwd = integrate(params, &back_state, &integrals.reversed(), config)?;
    let s0 = initial.affine;
    let mut samples: Vec<PathSample> = bwd
        .samples
        .iter()
        .skip(1)
        .rev()
        .map(|smp| {
            let mut c = *smp;
            c.affine = s0 - smp.affine;
            c.velocity = smp.velocity.map(|v| -v);
            c
        })
        .collect();
    samples.extend(fwd.samples.iter().copied());
    let mut events: Vec<PathEvent> = bwd
        .events
        .iter()
        .rev()
        .map(|e| PathEvent { affine: s0 - e.affine, ..*e })
        .collect();
    events.extend(fwd.events.iter().copied());
    Ok(GeodesicPath { integrals: *integrals, samples, events, start: bwd.end, end: fwd.end, block: fwd.block })
}
