use anyhow::Result;
use kerrkit::photon_orbits::{locus_summary, timelike_threshold, LocusSummary};
use kerrkit::KerrParams;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::report::{Artifacts, Report};

pub fn run(cfg: &RunConfig, out: &Artifacts, report: &mut Report) -> Result<()> {
    let s = &cfg.sweep;
    report.tolerance("bisection", s.tol);
    report.tolerance("spread_bound", s.spread_bound);
    let table: Vec<kerrkit::Result<LocusSummary>> =
        s.spins.par_iter().map(|&a| locus_summary(&KerrParams::new(1.0, a)?, s.radii)).collect();
    let mut rows = Vec::new();
    for (a, r) in s.spins.iter().zip(table) {
        match r {
            Ok(r) => rows.push(r),
            Err(e) => report.holds("locus evaluated", format!("a={a}: {e}"), false),
        }
    }
    rows.sort_by(|x, y| x.spin.total_cmp(&y.spin));
    // spread ratio at the smallest spin estimates the constant of the small-spin bound
    let c_fit = rows.first().map(|r| r.spread_ratio);
    let a0 = rows.iter().take_while(|r| r.spread_ratio <= s.spread_bound).last().map(|r| r.spin);
    let a1 = match timelike_threshold(s.bracket.0, s.bracket.1, s.tol, s.radii) {
        Ok(v) => v,
        Err(e) => {
            report.holds("threshold search", e.to_string(), false);
            None
        }
    };
    for r in &rows {
        if a1.is_none_or(|a1| r.spin < a1) {
            report.holds("timelike below the threshold", format!("a={}", r.spin), r.timelike_everywhere);
        }
    }
    report.result("spread_constant", c_fit)?;
    report.result("a0", a0)?;
    report.result("a1", a1)?;
    report.result("a1_found", a1.is_some())?;
    out.csv(report, "sweep_locus.csv", &rows)?;
    Ok(())
}
