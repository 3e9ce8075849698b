use std::f64::consts::PI;

use anyhow::Result;
use kerrkit::geodesics::{
    angular_potential, classify, future_oriented, integrate_maximal, radial_potential, Block, FirstIntegrals,
    GeodesicState, PathRow, StartCondition,
};
use kerrkit::sampling::Halton;
use kerrkit::{Chart, KerrParams, SpacetimePoint};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{RaySpec, RunConfig};
use crate::report::{Artifacts, Report};

#[derive(Serialize)]
struct RayRow {
    index: usize,
    #[serde(rename = "E")]
    energy: f64,
    #[serde(rename = "L")]
    angular_momentum: f64,
    #[serde(rename = "Q")]
    carter: f64,
    block: String,
    r: f64,
    theta: f64,
    sign_r: f64,
    root_type: String,
    integrated_type: String,
    samples: usize,
    affine_span: f64,
    max_drift: f64,
    max_radial_residual: f64,
    incomplete: bool,
    error: String,
}

struct Outcome {
    row: RayRow,
    root: Option<String>,
    integrated: Option<String>,
    path_rows: Vec<PathRow>,
}

fn random_rays(params: &KerrParams, count: usize, seed: u64) -> Vec<RaySpec> {
    let (m, rp) = (params.mass, params.r_plus());
    let mut out = Vec::with_capacity(count);
    for u in Halton::new(6, seed).take(200 * count.max(1)) {
        if out.len() == count {
            break;
        }
        let e = if u[5] < 0.1 { 0.0 } else { 1.0 };
        let it = FirstIntegrals::new(e, m * (-6.0 + 12.0 * u[0]), m * m * (-1.0 + 31.0 * u[1]));
        let r = rp + m * (0.05 + 15.0 * u[2] * u[2]);
        let theta = 0.1 + (PI - 0.2) * u[3];
        let scale = it.scale(params);
        if it.validate(params).is_err()
            || radial_potential(params, &it, r) <= 1e-6 * scale * r * r
            || angular_potential(params, &it, theta) <= 1e-6 * scale
        {
            continue;
        }
        out.push(RaySpec {
            energy: it.energy,
            angular_momentum: it.angular_momentum,
            carter: it.carter,
            chart: Chart::BlI,
            coords: [0.0, r, theta, 0.0],
            sign_r: if u[4] < 0.5 { -1.0 } else { 1.0 },
            sign_theta: 1.0,
            expect: None,
        });
    }
    out
}

fn trace(cfg: &RunConfig, index: usize, ray: &RaySpec) -> Outcome {
    let p = cfg.params;
    let it = FirstIntegrals::new(ray.energy, ray.angular_momentum, ray.carter);
    let block = if ray.chart == Chart::BlII { Block::MII } else { Block::MI };
    let row = RayRow {
        index,
        energy: ray.energy,
        angular_momentum: ray.angular_momentum,
        carter: ray.carter,
        block: block.to_string(),
        r: ray.coords[1],
        theta: ray.coords[2],
        sign_r: ray.sign_r,
        root_type: String::new(),
        integrated_type: String::new(),
        samples: 0,
        affine_span: 0.0,
        max_drift: f64::NAN,
        max_radial_residual: f64::NAN,
        incomplete: false,
        error: String::new(),
    };
    let mut out = Outcome { row, root: None, integrated: None, path_rows: Vec::new() };
    let state = GeodesicState::new(SpacetimePoint::new(ray.chart, ray.coords), ray.sign_r, ray.sign_theta);
    let oriented = it.validate(&p).and_then(|_| future_oriented(&p, &it, &state));
    let (fst, fit) = match oriented {
        Ok(v) => v,
        Err(e) => {
            out.row.error = e.to_string();
            return out;
        }
    };
    let start = StartCondition { block, r: ray.coords[1], sign_r: fst.sign_r };
    match classify(&p, &fit, &start) {
        Ok(t) => out.root = Some(t.to_string()),
        Err(e) => out.row.error = format!("classify: {e}"),
    }
    match integrate_maximal(&p, &fst, &fit, &cfg.geodesic.integration) {
        Ok(path) => {
            out.integrated = path.geodesic_type().map(|t| t.to_string());
            out.row.samples = path.samples.len();
            if let (Some(a), Some(b)) = (path.samples.first(), path.samples.last()) {
                out.row.affine_span = b.affine - a.affine;
            }
            out.row.max_drift = path.max_drift();
            out.row.max_radial_residual = path.max_radial_residual();
            out.row.incomplete = path.is_incomplete();
            if cfg.geodesic.dump_paths {
                out.path_rows = path.samples.iter().map(PathRow::from).collect();
            }
        }
        Err(e) => out.row.error = format!("integrate: {e}"),
    }
    out.row.root_type = out.root.clone().unwrap_or_default();
    out.row.integrated_type = out.integrated.clone().unwrap_or_default();
    out
}

pub fn run(cfg: &RunConfig, out: &Artifacts, report: &mut Report) -> Result<()> {
    let g = &cfg.geodesic;
    report.tolerance("drift", g.drift_tol);
    report.tolerance("radial_residual", g.radial_tol);
    report.tolerance("rtol", g.integration.rtol);
    let mut rays = g.rays.clone();
    rays.extend(random_rays(&cfg.params, g.random, cfg.seed));
    let outcomes: Vec<Outcome> = rays.par_iter().enumerate().map(|(i, r)| trace(cfg, i, r)).collect();

    let mut agree = 0;
    let mut types = Vec::new();
    for (ray, o) in rays.iter().zip(&outcomes) {
        let rec = format!("ray {} (E={}, L={}, Q={}, r={})", o.row.index, ray.energy, ray.angular_momentum, ray.carter, ray.coords[1]);
        if !o.row.error.is_empty() && o.integrated.is_none() && o.root.is_none() {
            report.holds("ray traced", format!("{rec}: {}", o.row.error), false);
            continue;
        }
        if o.row.samples > 0 {
            report.at_most("conservation drift", rec.clone(), o.row.max_drift, g.drift_tol);
            report.at_most("radial residual", rec.clone(), o.row.max_radial_residual, g.radial_tol);
        }
        if let (Some(a), Some(b)) = (&o.root, &o.integrated) {
            report.holds("classification agrees with integration", format!("{rec}: {a} vs {b}"), a == b);
            agree += usize::from(a == b);
        }
        if let Some(want) = &ray.expect {
            let got = o.root.as_ref().or(o.integrated.as_ref()).cloned().unwrap_or_default();
            report.holds("expected classification", format!("{rec}: expected {want}, got {got}"), &got == want);
        }
        types.push(o.row.root_type.clone());
    }
    report.result("rays", rays.len())?;
    report.result("agreements", agree)?;
    report.result("classifications", &types)?;

    if g.dump_paths {
        for o in &outcomes {
            out.csv(report, &format!("geodesic_path_{:04}.csv", o.row.index), &o.path_rows)?;
        }
    }
    let rows: Vec<&RayRow> = outcomes.iter().map(|o| &o.row).collect();
    out.csv(report, "geodesic_rays.csv", &rows)?;
    Ok(())
}
