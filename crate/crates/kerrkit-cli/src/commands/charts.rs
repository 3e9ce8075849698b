use std::f64::consts::PI;

use anyhow::Result;
use kerrkit::geometry::{isometry_defect, metric, Mat4};
use kerrkit::sampling::Halton;
use kerrkit::{Chart, KerrParams, SpacetimePoint};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::report::{Artifacts, Report};

#[derive(Serialize)]
struct IsometryRow {
    from: &'static str,
    to: &'static str,
    x0: f64,
    x1: f64,
    x2: f64,
    x3: f64,
    defect: f64,
}

#[derive(Serialize)]
struct MetricRow {
    chart: &'static str,
    x0: f64,
    x1: f64,
    x2: f64,
    x3: f64,
    det: f64,
    expected: f64,
    rel_residual: f64,
    inverse_defect: f64,
}

/// Determinant by cofactor expansion over 2x2 minors of the first two rows.
fn det4(m: &Mat4) -> f64 {
    let minor = |r: usize, i: usize, j: usize| m[r][i] * m[r + 1][j] - m[r][j] * m[r + 1][i];
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let signs = [1.0, -1.0, 1.0, 1.0, -1.0, 1.0];
    (0..6).map(|k| {
        let ((i, j), (a, b)) = (pairs[k], pairs[5 - k]);
        signs[k] * minor(0, i, j) * minor(2, a, b)
    })
        .sum()
}

fn sample(params: &KerrParams, u: &[f64], interior: bool) -> [f64; 4] {
    let (m, rp, rm) = (params.mass, params.r_plus(), params.r_minus());
    let r = if interior { rm + (rp - rm) * (0.15 + 0.7 * u[1]) } else { rp + m * (0.2 + 15.0 * u[1]) };
    [m * (-3.0 + 6.0 * u[0]), r, 0.15 + (PI - 0.3) * u[2], 2.0 * PI * u[3]]
}

pub fn run(cfg: &RunConfig, out: &Artifacts, report: &mut Report) -> Result<()> {
    let c = &cfg.charts;
    let p = cfg.params;
    report.tolerance("isometry", c.isometry_tol);
    report.tolerance("determinant", c.determinant_tol);
    report.tolerance("jacobian_step", kerrkit::geometry::JACOBIAN_STEP);

    let pairs: Vec<(Chart, Chart, bool)> = c
        .exterior_pairs
        .iter()
        .map(|&(a, b)| (a, b, false))
        .chain(c.interior_pairs.iter().map(|&(a, b)| (a, b, true)))
        .collect();
    let per_pair: Vec<Vec<(IsometryRow, Option<String>)>> = pairs
        .par_iter()
        .map(|&(from, to, interior)| {
            Halton::new(4, cfg.seed)
                .take(c.points)
                .map(|u| {
                    let x = sample(&p, &u, interior);
                    let pt = SpacetimePoint::new(from, x);
                    let (defect, err) = match isometry_defect(&p, &pt, to) {
                        Ok(d) => (d, None),
                        Err(e) => (f64::NAN, Some(e.to_string())),
                    };
                    let row = IsometryRow { from: from.name(), to: to.name(), x0: x[0], x1: x[1], x2: x[2], x3: x[3], defect };
                    (row, err)
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for ((from, to, _), group) in pairs.iter().zip(per_pair) {
        let (mut pair_worst, mut at, mut error) = (0.0f64, String::new(), None);
        for (r, e) in group {
            if error.is_none() && e.is_some() {
                error = e.map(|e| format!("{} -> {} at {:?}: {e}", from.name(), to.name(), [r.x0, r.x1, r.x2, r.x3]));
            }
            if !(r.defect <= pair_worst) {
                pair_worst = r.defect;
                at = format!("{} -> {} at [{}, {}, {}, {}]", from.name(), to.name(), r.x0, r.x1, r.x2, r.x3);
            }
            rows.push(r);
        }
        if let Some(e) = error {
            report.holds("chart map defined", e, false);
        }
        report.at_most("isometry defect", at, pair_worst, c.isometry_tol);
        worst = worst.max(pair_worst);
    }
    out.csv(report, "charts_isometry.csv", &rows)?;
    report.result("max_isometry_defect", worst)?;

    let mut mrows = Vec::new();
    for (chart, interior) in [(Chart::BlI, false), (Chart::BlII, true), (Chart::KerrStar, false), (Chart::KerrStar, true)] {
        for u in Halton::new(4, cfg.seed + 7).take(c.points) {
            let x = sample(&p, &u, interior);
            let g = metric(&p, &SpacetimePoint::new(chart, x))?;
            let det = det4(&g.cov);
            let rho2 = p.rho2(x[1], x[2]);
            let expected = -rho2 * rho2 * x[2].sin().powi(2);
            let rel = ((det - expected) / expected).abs();
            mrows.push(MetricRow {
                chart: chart.name(),
                x0: x[0],
                x1: x[1],
                x2: x[2],
                x3: x[3],
                det,
                expected,
                rel_residual: rel,
                inverse_defect: g.inverse_defect(),
            });
        }
    }
    let worst_det = mrows.iter().map(|r| r.rel_residual).fold(0.0, f64::max);
    if let Some(r) = mrows.iter().find(|r| !(r.rel_residual <= c.determinant_tol)) {
        let rec = format!("{} at [{}, {}, {}, {}]", r.chart, r.x0, r.x1, r.x2, r.x3);
        report.at_most("determinant residual", rec, r.rel_residual, c.determinant_tol);
    } else {
        report.at_most("determinant residual", "all metric samples", worst_det, c.determinant_tol);
    }
    out.csv(report, "charts_metric.csv", &mrows)?;
    report.result("max_determinant_residual", worst_det)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det4_of_a_permuted_diagonal() {
        let mut m = [[0.0; 4]; 4];
        m[0][1] = 2.0;
        m[1][0] = 3.0;
        m[2][2] = 5.0;
        m[3][3] = 7.0;
        assert_eq!(det4(&m), -210.0);
        let id = [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]];
        assert_eq!(det4(&id), 1.0);
    }
}
