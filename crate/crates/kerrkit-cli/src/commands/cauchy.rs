use anyhow::Result;
use kerrkit::causal::{crossing_tally, gradient_survey, sample_paths, CrossingTally, GradientSurvey, Surface};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::report::{Artifacts, Report};

#[derive(Serialize)]
struct GradientRow {
    surface: &'static str,
    level: Option<f64>,
    points: usize,
    not_timelike: usize,
    max_norm: f64,
    bounded: usize,
    bound_violations: usize,
    min_bound_margin: Option<f64>,
    errors: usize,
}

#[derive(Serialize)]
struct CrossingRow {
    surface: &'static str,
    level: Option<f64>,
    paths: usize,
    once: usize,
    incomplete: usize,
    multiple: usize,
    missed: usize,
    errors: usize,
    once_fraction: f64,
}

fn level(s: &kerrkit::causal::SurfaceSpec) -> Option<f64> {
    use kerrkit::causal::SurfaceSpec::*;
    match *s {
        SigmaT { level } | SigmaBar { level, .. } | SigmaTilde { level, .. } | Z { level } => Some(level),
        SigmaM => None,
    }
}

pub fn run(cfg: &RunConfig, out: &Artifacts, report: &mut Report) -> Result<()> {
    let c = &cfg.cauchy;
    let p = cfg.params;
    report.tolerance("bound_slack", c.bound_slack);
    report.tolerance("min_once_fraction", c.min_once_fraction);
    report.tolerance("rtol", c.integration.rtol);
    let surfaces: Vec<Surface> = c.surfaces.iter().map(|s| Surface::new(&p, *s)).collect::<kerrkit::Result<_>>()?;

    let surveys: Vec<GradientSurvey> =
        surfaces.par_iter().map(|s| gradient_survey(s, c.points, cfg.seed, c.bound_slack)).collect();
    let mut grows = Vec::new();
    for g in &surveys {
        let rec = match &g.first_failure {
            Some(f) => format!("{}: {f}", g.surface.name()),
            None => format!("{} over {} points", g.surface.name(), g.points),
        };
        report.holds("gradient timelike and bounded", rec, g.passed());
        grows.push(GradientRow {
            surface: g.surface.name(),
            level: level(&g.surface),
            points: g.points,
            not_timelike: g.not_timelike,
            max_norm: g.max_norm,
            bounded: g.bounded,
            bound_violations: g.bound_violations,
            min_bound_margin: g.min_bound_margin.is_finite().then_some(g.min_bound_margin),
            errors: g.errors,
        });
    }
    out.csv(report, "cauchy_gradients.csv", &grows)?;

    let batch = sample_paths(&p, c.paths, cfg.seed, &c.integration);
    report.at_most("paths integrated", "sample path batch", batch.failed as f64, 0.0);
    let tallies: Vec<CrossingTally> = surfaces.par_iter().map(|s| crossing_tally(s, &batch.paths)).collect();
    let mut crows = Vec::new();
    for t in &tallies {
        let rec = format!(
            "{}: {} of {} once, {} incomplete, {} multiple, {} missed, {} errors",
            t.surface.name(),
            t.once,
            t.paths,
            t.incomplete,
            t.multiple,
            t.missed,
            t.errors
        );
        report.holds("crossing property", rec, t.passed(c.min_once_fraction));
        crows.push(CrossingRow {
            surface: t.surface.name(),
            level: level(&t.surface),
            paths: t.paths,
            once: t.once,
            incomplete: t.incomplete,
            multiple: t.multiple,
            missed: t.missed,
            errors: t.errors,
            once_fraction: t.once_fraction(),
        });
    }
    out.csv(report, "cauchy_crossings.csv", &crows)?;
    report.result("gradients", &surveys)?;
    report.result("crossings", &tallies)?;
    Ok(())
}
