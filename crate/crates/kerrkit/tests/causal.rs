use std::collections::BTreeMap;
use std::f64::consts::PI;

use kerrkit::causal::*;
use kerrkit::geodesics::{
    angular_potential, classify, future_oriented, integrate_maximal, radial_potential, Block, FirstIntegrals, GeodesicPath,
    GeodesicState, IntegrationConfig, PathSample, StartCondition,
};
use kerrkit::geometry::{chart_map, metric, Chart, KerrParams, SpacetimePoint};
use kerrkit::photon_orbits::{critical_locus, radial_roots};
use kerrkit::sampling::Halton;

const SPINS: [f64; 4] = [0.0, 0.1, 0.3, 0.5];
const POINTS: usize = 10_000;
const BOUND_SLACK: f64 = 1e-10;

fn specs() -> [SurfaceSpec; 5] {
    [
        SurfaceSpec::SigmaT { level: 0.0 },
        SurfaceSpec::SigmaBar { level: -2.0, n: 4.0 },
        SurfaceSpec::SigmaTilde { level: -2.0, n: 3.0 },
        SurfaceSpec::Z { level: 12.0 },
        SurfaceSpec::SigmaM,
    ]
}

#[test]
fn gradients_are_timelike_and_respect_the_bounds() {
    for a in SPINS {
        let p = KerrParams::new(1.0, a).unwrap();
        for spec in specs() {
            let s = Surface::new(&p, spec).unwrap();
            let g = gradient_survey(&s, POINTS, 101, BOUND_SLACK);
            assert!(g.passed(), "a={a}: {g:?}");
            assert_eq!(g.points, POINTS);
            match spec {
                SurfaceSpec::SigmaBar { .. } | SurfaceSpec::SigmaTilde { .. } => assert_eq!(g.bounded, POINTS),
                SurfaceSpec::Z { .. } => assert!(g.bounded > POINTS / 3, "{}", g.bounded),
                _ => assert_eq!(g.bounded, 0),
            }
            assert!(g.min_bound_margin.is_infinite() || g.min_bound_margin > -1e-8);
        }
    }
}

#[test]
fn region_points_scale_with_mass() {
    let p = KerrParams::new(3.0, 0.9).unwrap();
    let s = Surface::new(&p, SurfaceSpec::SigmaBar { level: 0.0, n: 4.0 }).unwrap();
    let g = gradient_survey(&s, 500, 7, BOUND_SLACK);
    assert!(g.passed(), "{g:?}");
    for u in Halton::new(5, 3).take(200) {
        if let Some(pt) = region_point(&s, &u) {
            assert!(pt.coords[1] > p.r_plus());
        }
    }
}

#[test]
fn random_batches_cross_every_surface_once() {
    let p = KerrParams::new(1.0, 0.3).unwrap();
    let config = IntegrationConfig { r_max: 1e4, cross_future_horizon: true, ..Default::default() };
    let batch = sample_paths(&p, 100, 40, &config);
    assert_eq!(batch.paths.len(), 100);
    for spec in specs() {
        let t = crossing_tally(&Surface::new(&p, spec).unwrap(), &batch.paths);
        assert!(t.passed(0.95), "{t:?}");
    }
}

#[test]
fn sigma_tilde_inner_branch_bound() {
    let p = KerrParams::new(1.0, 0.3).unwrap();
    let s = Surface::new(&p, SurfaceSpec::SigmaTilde { level: 0.0, n: 50.0 }).unwrap();
    for u in Halton::new(2, 5).take(2000) {
        let r = p.r_plus() + (3.0 - p.r_plus()) * (0.001 + 0.998 * u[0]);
        let th = 0.05 + (PI - 0.1) * u[1];
        let pt = SpacetimePoint::new(Chart::BlI, [0.0, r, th, 0.0]);
        let rho2 = p.rho2(r, th);
        assert!(-s.gradient_norm(&pt).unwrap() >= 1.0 / rho2 - 1e-10);
    }
}

#[test]
fn z_inner_norm_matches_the_closed_form() {
    let p = KerrParams::new(1.0, 0.4).unwrap();
    let s = Surface::new(&p, SurfaceSpec::Z { level: 15.0 }).unwrap();
    let a = p.spin;
    for r in [0.1, 0.5, 1.2, 1.8, p.r_plus()] {
        let th: f64 = 0.7;
        let pt = SpacetimePoint::new(Chart::KerrStar, [1.0, r, th, 0.3]);
        let dv = s.profiles.dv(r);
        let direct = (a * a * th.sin().powi(2) - 2.0 * (r * r + a * a) * dv + p.delta(r) * dv * dv) / p.rho2(r, th);
        let n = s.gradient_norm(&pt).unwrap();
        assert!((n - direct).abs() < 1e-12 * direct.abs().max(1.0), "r={r}: {n} vs {direct}");
    }
}

#[test]
fn gradient_norm_scales_with_mass() {
    let spec = SurfaceSpec::SigmaBar { level: 0.0, n: 4.0 };
    let p1 = KerrParams::new(1.0, 0.3).unwrap();
    let p2 = KerrParams::new(2.5, 0.75).unwrap();
    let n1 = surface_gradient_norm(&p1, spec, &SpacetimePoint::new(Chart::BlI, [0.0, 5.0, 1.0, 0.0])).unwrap();
    let n2 = surface_gradient_norm(&p2, spec, &SpacetimePoint::new(Chart::BlI, [0.0, 12.5, 1.0, 0.0])).unwrap();
    // t and r components of the inverse metric are scale invariant
    assert!((n2 - n1).abs() < 1e-12);
}

#[test]
fn profile_limits() {
    for a in [0.0, 0.3, 0.6] {
        let p = KerrParams::new(1.0, a).unwrap();
        let pr = radial_profiles(&p).unwrap();
        let r = pr.rp + 1e-6;
        assert!((pr.y(r).unwrap() - pr.x(r)).abs() < 1e-6);
        for r in [pr.rp, pr.rp + 1e-3, 3.0, 50.0] {
            assert_eq!(pr.v(r).unwrap(), r);
        }
        assert!(pr.v(pr.rm + 1e-12).unwrap() < pr.v(pr.rm + 1e-6).unwrap() - 10.0);
        for u in Halton::new(1, 3).take(500) {
            let r = pr.rp + 10f64.powf(-6.0 + 9.0 * u[0]);
            assert!(pr.f(r) > 0.0);
        }
    }
}

#[test]
fn r_t_decays_exponentially() {
    let p = KerrParams::new(1.0, 0.3).unwrap();
    let pr = radial_profiles(&p).unwrap();
    let d: Vec<f64> = [20.0, 25.0, 30.0].iter().map(|&t| pr.r_t_offset(t).unwrap()).collect();
    for (i, t) in [20.0, 25.0, 30.0].iter().enumerate() {
        let rt = pr.r_t(*t).unwrap();
        assert!(rt > pr.rp && rt < 2.0 * pr.rp);
        assert!((pr.x(rt) - rt + t).abs() < 1e-9);
        assert!(d[i] > 0.0);
    }
    // d = C exp(-c T) with c = 2 kappa_+ and C of order one
    let c = -(d[2] / d[0]).ln() / 10.0;
    let c2 = -(d[1] / d[0]).ln() / 5.0;
    let kappa = kerrkit::geometry::horizon_quantities(&p).unwrap().kappa_plus;
    assert!(c > 0.0 && (c - c2).abs() < 1e-6 * c && (c - 2.0 * kappa).abs() < 1e-6 * c);
    let pre = d[0] * (c * 20.0).exp();
    assert!(pre > 0.5 && pre < 2.0, "C = {pre}");
    for (i, t) in [20.0, 25.0, 30.0].iter().enumerate() {
        assert!(d[i] < (-0.99 * c * t).exp());
    }
    // too small a T has no bracket
    assert!(pr.r_t_offset(-10.0).is_err());
}

fn bl_in(r: f64, theta: f64, t0: f64) -> SpacetimePoint {
    SpacetimePoint::new(Chart::BlI, [t0, r, theta, 0.0])
}

/// Future-directed maximal paths from quasi-random exterior starts, grouped
/// by geodesic type.
fn exterior_paths(p: &KerrParams, per_type: usize, cross: bool) -> BTreeMap<String, Vec<GeodesicPath>> {
    let config = IntegrationConfig { r_max: 1e4, cross_future_horizon: cross, ..Default::default() };
    let mut out: BTreeMap<String, Vec<GeodesicPath>> = BTreeMap::new();
    let rp = p.r_plus();
    for u in Halton::new(6, 40).take(20_000) {
        let e = if u[5] < 0.1 { 0.0 } else { 1.0 };
        let it = FirstIntegrals::new(e, -6.0 + 12.0 * u[0], -1.0 + 31.0 * u[1]);
        if it.validate(p).is_err() {
            continue;
        }
        let r = rp + 0.02 + 12.0 * u[2] * u[2];
        let theta = 0.1 + (PI - 0.2) * u[3];
        let scale = it.scale(p);
        if radial_potential(p, &it, r) <= 1e-6 * scale * r * r || angular_potential(p, &it, theta) <= 1e-6 * scale {
            continue;
        }
        let st = GeodesicState::new(bl_in(r, theta, -5.0), if u[4] < 0.5 { -1.0 } else { 1.0 }, 1.0);
        let (fst, fit) = future_oriented(p, &it, &st).unwrap();
        let start = StartCondition { block: Block::MI, r, sign_r: fst.sign_r };
        match classify(p, &fit, &start) {
            Ok(ty) if out.get(&ty.to_string()).is_some_and(|b| b.len() >= per_type) => continue,
            Err(_) => continue,
            _ => {}
        }
        let path = integrate_maximal(p, &fst, &fit, &config).unwrap();
        let Some(ty) = path.geodesic_type() else { continue };
        let bucket = out.entry(ty.to_string()).or_default();
        if bucket.len() < per_type {
            bucket.push(path);
        }
    }
    // asymptotic and spherical orbits at a double root
    let loc = critical_locus(p, 3.0 * p.mass).unwrap();
    let it = loc.integrals();
    for k in 0..5 {
        for i in 0..per_type {
            let theta = 0.6 + 1.9 * ((i as f64 * 0.618_034) % 1.0);
            if angular_potential(p, &it, theta) <= 0.0 {
                continue;
            }
            let off = 0.05 + 0.02 * (i % 7) as f64;
            let (r0, sign) = match k {
                0 => (3.0, 1.0),
                1 => (3.0 + off, 1.0),
                2 => (3.0 + off, -1.0),
                3 => (3.0 - off, -1.0),
                _ => (3.0 - off, 1.0),
            };
            let st = GeodesicState::new(bl_in(r0 * p.mass, theta, -5.0), sign, 1.0);
            let (fst, fit) = future_oriented(p, &it, &st).unwrap();
            let path = integrate_maximal(p, &fst, &fit, &config).unwrap();
            let Some(ty) = path.geodesic_type() else { continue };
            let bucket = out.entry(ty.to_string()).or_default();
            if bucket.len() < per_type {
                bucket.push(path);
            }
        }
    }
    out
}

#[test]
fn exterior_paths_cross_each_level_set_once() {
    let p = KerrParams::new(1.0, 0.5).unwrap();
    let groups = exterior_paths(&p, 20, false);
    let mut summary = Vec::new();
    for spec in [
        SurfaceSpec::SigmaT { level: 0.0 },
        SurfaceSpec::SigmaBar { level: -2.0, n: 4.0 },
        SurfaceSpec::SigmaTilde { level: -2.0, n: 3.0 },
        SurfaceSpec::SigmaM,
    ] {
        let s = Surface::new(&p, spec).unwrap();
        for (ty, paths) in &groups {
            for path in paths {
                let rep = crossing_report_with(&s, path).unwrap();
                assert!(rep.crosses_once(), "{spec:?} {ty}: {rep:?}");
                if spec != SurfaceSpec::SigmaM {
                    assert!(rep.sup_diverges && rep.inf_diverges, "{spec:?} {ty}: {rep:?}");
                }
            }
            summary.push((ty.clone(), paths.len()));
        }
    }
    for (ty, n) in &summary {
        assert!(*n >= 20, "only {n} paths of type {ty}");
    }
    assert!(groups.len() >= 6, "{:?}", groups.keys().collect::<Vec<_>>());
}

#[test]
fn z_is_crossed_once_by_paths_through_the_future_horizon() {
    let p = KerrParams::new(1.0, 0.5).unwrap();
    let s = Surface::new(&p, SurfaceSpec::Z { level: 12.0 }).unwrap();
    let groups = exterior_paths(&p, 20, true);
    let mut interior = 0;
    for (ty, paths) in &groups {
        for path in paths {
            let rep = crossing_report_with(&s, path).unwrap();
            assert!(rep.crosses_once(), "{ty}: {rep:?}");
            assert!(rep.sup_diverges && rep.inf_diverges, "{ty}: {rep:?}");
            if path.samples.iter().any(|x| x.point.coords[1] < p.r_plus()) {
                interior += 1;
                // u_T grows without bound toward r-
                assert_eq!(rep.future.unwrap().log_divergence, Some(1.0), "{ty}: {rep:?}");
            }
        }
    }
    assert!(interior >= 20);
}

/// Interior starts whose past end lies on the horizon shared with `M_I'`
/// (`P(r+) < 0`) or with `M_I` (`P(r+) > 0`).
fn interior_paths(p: &KerrParams, want_primed: bool, n: usize) -> Vec<GeodesicPath> {
    let (rp, rm, a) = (p.r_plus(), p.r_minus(), p.spin);
    let config = IntegrationConfig { cross_future_horizon: true, ..Default::default() };
    let mut out = Vec::new();
    for u in Halton::new(5, 9).take(4000) {
        if out.len() == n {
            break;
        }
        let it = FirstIntegrals::new(1.0, -20.0 + 40.0 * u[0], -1.0 + 31.0 * u[1]);
        if it.validate(p).is_err() {
            continue;
        }
        let p_plus = (rp * rp + a * a) - a * it.angular_momentum;
        if p_plus.abs() < 0.05 || (p_plus < 0.0) != want_primed {
            continue;
        }
        // near-degenerate: a turning point hugging the horizon
        if radial_roots(p, &it).roots.iter().any(|x| (x.r - rp).abs() < 1e-2) {
            continue;
        }
        let r = rm + (rp - rm) * (0.1 + 0.8 * u[2]);
        let theta = 0.1 + (PI - 0.2) * u[3];
        if angular_potential(p, &it, theta) <= 1e-6 * it.scale(p) {
            continue;
        }
        let st = GeodesicState::new(SpacetimePoint::new(Chart::BlII, [-5.0, r, theta, 0.0]), -1.0, 1.0);
        let (fst, fit) = future_oriented(p, &it, &st).unwrap();
        let path = integrate_maximal(p, &fst, &fit, &config).unwrap();
        if path.geodesic_type().is_some() {
            out.push(path);
        }
    }
    out
}

fn kerr_star_time(p: &KerrParams, s: &PathSample) -> f64 {
    chart_map(p, &s.point, Chart::KerrStar).unwrap().coords[0]
}

#[test]
fn interior_entry_time_pattern() {
    let p = KerrParams::new(1.0, 0.5).unwrap();
    let s = Surface::new(&p, SurfaceSpec::Z { level: 12.0 }).unwrap();
    // entering from M_I': t* -> -inf, so u_T -> -inf and Z is crossed in M_II
    let primed = interior_paths(&p, true, 20);
    assert_eq!(primed.len(), 20);
    for path in &primed {
        let rep = crossing_report_with(&s, path).unwrap();
        assert!(rep.crosses_once(), "{rep:?}");
        assert_eq!(rep.past.unwrap().log_divergence, Some(-1.0), "{rep:?}");
        assert_eq!(rep.future.unwrap().log_divergence, Some(1.0), "{rep:?}");
    }
    // entering from M_I: t* has a finite limit at entry
    let unprimed = interior_paths(&p, false, 20);
    assert_eq!(unprimed.len(), 20);
    for path in &unprimed {
        // the entry may be preceded by a stretch in M_I; t* is finite across it
        let i = path.samples.iter().position(|x| x.point.coords[1] < p.r_plus()).unwrap();
        let t0 = kerr_star_time(&p, &path.samples[i]);
        let t1 = kerr_star_time(&p, &path.samples[(i + 4).min(path.samples.len() - 1)]);
        assert!(t0.is_finite() && t0.abs() < 1e2 && (t0 - t1).abs() < 10.0, "{t0} {t1}");
        if i > 0 {
            let tb = kerr_star_time(&p, &path.samples[i - 1]);
            assert!((tb - t0).abs() < 10.0, "{tb} {t0}");
        }
    }
}

#[test]
fn rest_photon_crosses_sigma_m_once() {
    let p = KerrParams::new(1.0, 0.3).unwrap();
    let theta = 1.1;
    // the horizon generator U = 0 with V as affine parameter is null
    let g = metric(&p, &SpacetimePoint::new(Chart::Kbl, [0.0, 2.0, theta, 0.4])).unwrap();
    assert!(g.cov[1][1].abs() < 1e-12);
    let samples = (0..=400)
        .map(|i| {
            let v = -2.0e3 + 10.0 * i as f64;
            PathSample {
                affine: v,
                point: SpacetimePoint::new(Chart::Kbl, [0.0, v, theta, 0.4]),
                velocity: [0.0, 1.0, 0.0, 0.0],
                block: Block::MI,
                e_drift: 0.0,
                l_drift: 0.0,
                k_drift: 0.0,
                null_drift: 0.0,
                radial_residual: 0.0,
            }
        })
        .collect();
    let path = GeodesicPath {
        integrals: FirstIntegrals::new(1.0, 0.0, 0.0),
        samples,
        events: Vec::new(),
        start: None,
        end: None,
        block: Block::MI,
    };
    let rep = crossing_report(&p, SurfaceSpec::SigmaM, &path).unwrap();
    assert!(rep.crosses_once() && rep.sup_diverges && rep.inf_diverges, "{rep:?}");
}

#[test]
fn escaping_path_crosses_sigma_t_once() {
    let p = KerrParams::new(1.0, 0.3).unwrap();
    let it = FirstIntegrals::new(1.0, 1.0, 4.0);
    let st = GeodesicState::new(bl_in(8.0, 1.2, -5.0), 1.0, 1.0);
    let config = IntegrationConfig { r_max: 1e4, ..Default::default() };
    let (fst, fit) = future_oriented(&p, &it, &st).unwrap();
    let path = integrate_maximal(&p, &fst, &fit, &config).unwrap();
    let rep = crossing_report(&p, SurfaceSpec::SigmaT { level: 0.0 }, &path).unwrap();
    assert!(rep.crosses_once() && rep.sup_diverges, "{rep:?}");
    assert!(rep.sup_u > DIVERGENCE_THRESHOLD);
}
