use anyhow::Result;
use kerrkit::thermal::{
    fermi_factor, kernel_row_check, route_residual, unruh_identity_residual_with, unruh_lattice_residual,
    unruh_test_function, Sign, TestFunction,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::report::{Artifacts, Report};

#[derive(Serialize)]
struct ResidualRow {
    function: String,
    points: usize,
    residual: f64,
}

#[derive(Serialize)]
struct UnruhRow {
    kappa: f64,
    beta: f64,
    sign: Sign,
    mellin_residual: f64,
    lattice_residual: f64,
}

#[derive(Serialize)]
struct KernelRow {
    sign: Sign,
    points: usize,
    delta: f64,
    compared: usize,
    max_rel_error: f64,
}

#[derive(Serialize)]
struct FermiRow {
    beta: f64,
    lambda: f64,
    chi_plus: f64,
    chi_minus: f64,
    partition_defect: f64,
}

fn label(f: &TestFunction) -> String {
    match f {
        TestFunction::LogGaussian { center, width } => format!("log-gaussian({center},{width})"),
        TestFunction::Gaussian { center, width } => format!("gaussian({center},{width})"),
        TestFunction::Bump { lo, hi } => format!("bump({lo},{hi})"),
    }
}

pub fn run(cfg: &RunConfig, out: &Artifacts, report: &mut Report) -> Result<()> {
    let t = &cfg.thermal;
    report.tolerance("residual", t.tolerance);
    report.tolerance("partition", t.partition_tol);
    report.tolerance("kernel", t.kernel_tol);
    report.tolerance("aliasing", kerrkit::thermal::ALIASING_TOL);
    report.tolerance("decay", kerrkit::thermal::DECAY_TOL);

    let sizes: Vec<usize> = (0..=t.refinements).map(|k| t.points << k).collect();
    let jobs: Vec<(usize, usize)> = (0..t.functions.len()).flat_map(|i| sizes.iter().map(move |&n| (i, n))).collect();
    let residuals: Vec<kerrkit::Result<f64>> =
        jobs.par_iter().map(|&(i, n)| route_residual(&t.functions[i], n)).collect();
    let mut rows = Vec::new();
    for (i, f) in t.functions.iter().enumerate() {
        let name = label(f);
        let mut prev = f64::INFINITY;
        for ((_, n), r) in jobs.iter().zip(&residuals).filter(|((j, _), _)| *j == i) {
            let rec = format!("{name} at N={n}");
            match r {
                Ok(r) => {
                    if *n == t.points {
                        report.at_most("route residual", rec.clone(), *r, t.tolerance);
                    } else {
                        report.at_most("residual decreases under refinement", rec.clone(), *r, prev);
                    }
                    prev = *r;
                    rows.push(ResidualRow { function: name.clone(), points: *n, residual: *r });
                }
                Err(e) => report.holds("route residual computed", format!("{rec}: {e}"), false),
            }
        }
    }
    out.csv(report, "thermal_residuals.csv", &rows)?;

    let ujobs: Vec<(f64, Sign)> = t.kappas.iter().flat_map(|&k| [(k, Sign::Plus), (k, Sign::Minus)]).collect();
    let unruh: Vec<kerrkit::Result<UnruhRow>> = ujobs
        .par_iter()
        .map(|&(kappa, sign)| {
            let f = unruh_test_function(kappa, t.points)?;
            Ok(UnruhRow {
                kappa,
                beta: 2.0 * std::f64::consts::PI / kappa,
                sign,
                mellin_residual: unruh_identity_residual_with(kappa, &f, sign)?,
                lattice_residual: unruh_lattice_residual(kappa, &f, sign, t.points)?,
            })
        })
        .collect();
    let mut urows = Vec::new();
    for ((kappa, sign), r) in ujobs.iter().zip(unruh) {
        let rec = format!("kappa={kappa} sign={sign:?}");
        match r {
            Ok(r) => {
                report.at_most("exponential identity (Mellin)", rec.clone(), r.mellin_residual, t.tolerance);
                report.at_most("exponential identity (lattice)", rec, r.lattice_residual, t.tolerance);
                urows.push(r);
            }
            Err(e) => report.holds("exponential identity computed", format!("{rec}: {e}"), false),
        }
    }
    out.csv(report, "thermal_unruh.csv", &urows)?;

    let mut krows = Vec::new();
    for sign in [Sign::Plus, Sign::Minus] {
        let k = kernel_row_check(t.kernel_points, sign)?;
        report.at_most("lattice kernel", format!("sign={sign:?}"), k.max_rel_error, t.kernel_tol);
        krows.push(KernelRow { sign, points: k.points, delta: k.delta, compared: k.compared, max_rel_error: k.max_rel_error });
    }
    out.csv(report, "thermal_kernel.csv", &krows)?;

    let mut frows = Vec::new();
    for beta in [2.0 * std::f64::consts::PI, 8.0 * std::f64::consts::PI] {
        for i in 0..=400 {
            let lambda = -20.0 + 0.1 * i as f64;
            let (p, m) = (fermi_factor(beta, Sign::Plus, lambda), fermi_factor(beta, Sign::Minus, lambda));
            frows.push(FermiRow { beta, lambda, chi_plus: p, chi_minus: m, partition_defect: (p + m - 1.0).abs() });
        }
    }
    let worst = frows.iter().map(|r| r.partition_defect).fold(0.0, f64::max);
    report.at_most("Fermi factors partition unity", "all tabulated lambda", worst, t.partition_tol);
    out.csv(report, "thermal_fermi.csv", &frows)?;
    report.result("max_route_residual", rows.iter().filter(|r| r.points == t.points).map(|r| r.residual).fold(0.0, f64::max))?;
    report.result("max_unruh_residual", urows.iter().map(|r| r.lattice_residual.max(r.mellin_residual)).fold(0.0, f64::max))?;
    Ok(())
}
