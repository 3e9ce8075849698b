use kerrkit::geodesics::{integrate, FirstIntegrals, GeodesicState, IntegrationConfig};
use kerrkit::geometry::{killing_norm, Chart, KerrParams, KillingField, SpacetimePoint};
use kerrkit::photon_orbits::*;
use kerrkit::sampling::Halton;

/// `R` and `R'` written out term by term, independent of the library's
/// coefficient vector.
fn r_and_dr(a: f64, xi: f64, eta: f64, r: f64) -> (f64, f64) {
    let p = r * r + a * a - a * xi;
    let k = eta + (xi - a) * (xi - a);
    let delta = r * r - 2.0 * r + a * a;
    (p * p - delta * k, 4.0 * r * p - (2.0 * r - 2.0) * k)
}

#[test]
fn locus_is_a_double_zero_at_the_boundary_radii() {
    for a in [0.01, 0.05, 0.1, 0.2] {
        let p = KerrParams::new(1.0, a).unwrap();
        let (lo, hi) = spherical_orbit_range(&p).unwrap();
        for r0 in [lo, hi, 0.5 * (lo + hi)] {
            let loc = critical_locus(&p, r0).unwrap();
            let (rv, dv) = r_and_dr(a, loc.xi, loc.eta, r0);
            assert!(rv.abs() < 1e-9 && dv.abs() < 1e-9, "a={a} r0={r0}: {rv:e} {dv:e}");
        }
        // the boundary radii are where eta vanishes
        assert!(critical_locus(&p, lo).unwrap().eta.abs() < 1e-9);
        assert!(critical_locus(&p, hi).unwrap().eta.abs() < 1e-9);
    }
}

#[test]
fn locus_is_self_consistent_and_respects_constraints() {
    for a in [0.01, 0.05, 0.1, 0.2, 0.5] {
        let p = KerrParams::new(1.0, a).unwrap();
        let (lo, hi) = spherical_orbit_range(&p).unwrap();
        for i in 1..40 {
            let r0 = lo + (hi - lo) * i as f64 / 40.0;
            let loc = critical_locus(&p, r0).unwrap();
            assert!(loc.eta >= 0.0);
            assert!(loc.eta + (loc.xi - a).powi(2) >= 0.0);
            let ra = radial_roots(&p, &loc.integrals());
            let hit = ra.roots.iter().find(|x| (x.r - r0).abs() < 1e-7).expect("r0 not found");
            assert_eq!(hit.multiplicity, 2, "a={a} r0={r0}");
        }
    }
}

#[test]
fn locus_contracts_linearly_to_three() {
    let sweep = [0.2, 0.1, 0.05, 0.01];
    let mut ratios = Vec::new();
    for a in sweep {
        let p = KerrParams::new(1.0, a).unwrap();
        let (lo, hi) = spherical_orbit_range(&p).unwrap();
        ratios.push((3.0 - lo).max(hi - 3.0) / a);
    }
    // |r0 - 3| <= C a with a bounded fitted C
    let c = ratios.iter().cloned().fold(0.0, f64::max);
    assert!(c < 2.5, "C = {c}");
    for w in ratios.windows(2) {
        assert!((w[0] - w[1]).abs() < 0.1 * c);
    }
}

#[test]
fn no_double_zero_between_the_horizons() {
    let mut seen = 0;
    for u in Halton::new(4, 7).take(10_000) {
        let a = 0.99 * u[0];
        let p = KerrParams::new(1.0, a).unwrap();
        let it = FirstIntegrals::new(if u[3] < 0.1 { 0.0 } else { 1.0 }, -8.0 + 16.0 * u[1], -1.0 + 40.0 * u[2]);
        if it.validate(&p).is_err() {
            continue;
        }
        seen += 1;
        let ra = radial_roots(&p, &it);
        for r in ra.double_roots() {
            assert!(!(r > p.r_minus() && r < p.r_plus()), "double root {r} for a={a} {it:?}");
        }
    }
    assert!(seen > 5000);
}

#[test]
fn orbit_checks_at_small_spin() {
    let p = KerrParams::new(1.0, 0.1).unwrap();
    let (lo, hi) = spherical_orbit_range(&p).unwrap();
    for r0 in [lo, 3.0, hi] {
        let rep = orbit_checks(&p, r0).unwrap();
        assert!(rep.min_abs_t > 0.1, "min |T| = {}", rep.min_abs_t);
        assert!(rep.max_norm_vh < 0.0 && rep.max_norm_vi < 0.0);
        assert!(rep.timelike_everywhere);
        assert!((rep.max_norm_vi + 1.0 / 3.0).abs() < 0.05);
    }
}

#[test]
fn schwarzschild_reference_norm() {
    let p = KerrParams::new(1.0, 0.0).unwrap();
    for th in [0.3, 1.0, 1.9] {
        let pt = SpacetimePoint::new(Chart::BlI, [0.0, 3.0, th, 0.0]);
        let v = killing_norm(&p, KillingField::VI, &pt).unwrap();
        assert!((v + 1.0 / 3.0).abs() < 1e-12);
    }
}

#[test]
fn spherical_orbit_keeps_its_radius() {
    let p = KerrParams::new(1.0, 0.3).unwrap();
    let loc = critical_locus(&p, 3.1).unwrap();
    let state = GeodesicState::new(SpacetimePoint::new(Chart::BlI, [0.0, 3.1, 1.4, 0.0]), 1.0, 1.0);
    let config = IntegrationConfig { max_affine: 100.0, ..Default::default() };
    let path = integrate(&p, &state, &loc.integrals(), &config).unwrap();
    assert!(path.is_incomplete());
    let span = path.samples.last().unwrap().affine;
    assert!(span >= 100.0 - 1e-9);
    assert!(path.samples.iter().all(|s| (s.point.coords[1] - 3.1).abs() < 1e-6));
    assert!(path.max_drift() < 1e-8);
}

#[test]
fn timelikeness_threshold_is_found_by_bisection() {
    // the threshold, if any, lies above the small-spin regime
    let t = timelike_threshold(0.1, 0.999, 1e-3, 9).unwrap();
    if let Some(a1) = t {
        assert!(a1 > 0.1 && a1 < 0.999);
        let p = KerrParams::new(1.0, a1 + 2e-3).unwrap();
        assert!(!locus_summary(&p, 9).unwrap().timelike_everywhere);
    }
}
