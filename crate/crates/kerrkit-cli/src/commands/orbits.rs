use anyhow::Result;
use kerrkit::geodesics::{radial_potential, radial_potential_derivative};
use kerrkit::photon_orbits::{critical_locus, orbit_checks, spherical_orbit_range};
use kerrkit::KerrParams;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::report::{Artifacts, Report};

#[derive(Serialize)]
struct OrbitRow {
    a: f64,
    r0: f64,
    xi: f64,
    eta: f64,
    #[serde(rename = "minT")]
    min_t: f64,
    #[serde(rename = "max_norm_vH")]
    max_norm_vh: f64,
    #[serde(rename = "max_norm_vI")]
    max_norm_vi: f64,
    timelike_flag: bool,
    #[serde(rename = "R")]
    r_value: f64,
    #[serde(rename = "dR")]
    r_slope: f64,
}

fn row(mass: f64, a: f64, i: usize, n: usize) -> kerrkit::Result<OrbitRow> {
    let p = KerrParams::new(mass, a * mass)?;
    let (lo, hi) = spherical_orbit_range(&p)?;
    let r0 = lo + (hi - lo) * i as f64 / (n - 1) as f64;
    let rep = orbit_checks(&p, r0)?;
    let it = critical_locus(&p, r0)?.integrals();
    Ok(OrbitRow {
        a,
        r0,
        xi: rep.xi,
        eta: rep.eta,
        min_t: rep.min_abs_t,
        max_norm_vh: rep.max_norm_vh,
        max_norm_vi: rep.max_norm_vi,
        timelike_flag: rep.timelike_everywhere,
        r_value: radial_potential(&p, &it, r0),
        r_slope: radial_potential_derivative(&p, &it, r0),
    })
}

pub fn run(cfg: &RunConfig, out: &Artifacts, report: &mut Report) -> Result<()> {
    let o = &cfg.orbits;
    let m = cfg.params.mass;
    report.tolerance("root", o.root_tol);
    let spins = if o.spins.is_empty() { vec![cfg.params.spin / m] } else { o.spins.clone() };
    let jobs: Vec<(f64, usize)> = spins.iter().flat_map(|&a| (0..o.radii).map(move |i| (a, i))).collect();
    let rows: Vec<kerrkit::Result<OrbitRow>> = jobs.par_iter().map(|&(a, i)| row(m, a, i, o.radii)).collect();
    let mut ok = Vec::with_capacity(rows.len());
    for ((a, i), r) in jobs.iter().zip(rows) {
        match r {
            Ok(r) => ok.push(r),
            Err(e) => report.holds("orbit evaluated", format!("a={a} radius {i}: {e}"), false),
        }
    }
    for r in &ok {
        let rec = format!("a={} r0={}", r.a, r.r0);
        report.at_least("min |T| positive", rec.clone(), r.min_t, f64::MIN_POSITIVE);
        report.at_most("max g(vH, vH)", rec.clone(), r.max_norm_vh, 0.0);
        report.at_most("max g(vI, vI)", rec.clone(), r.max_norm_vi, 0.0);
        report.at_most("|R(r0)|", rec.clone(), r.r_value.abs(), o.root_tol);
        report.at_most("|R'(r0)|", rec, r.r_slope.abs(), o.root_tol);
    }
    report.result("min_abs_t", ok.iter().map(|r| r.min_t).fold(f64::INFINITY, f64::min))?;
    report.result("max_norm_vH", ok.iter().map(|r| r.max_norm_vh).fold(f64::NEG_INFINITY, f64::max))?;
    report.result("max_norm_vI", ok.iter().map(|r| r.max_norm_vi).fold(f64::NEG_INFINITY, f64::max))?;
    out.csv(report, "orbits.csv", &ok)?;
    Ok(())
}
