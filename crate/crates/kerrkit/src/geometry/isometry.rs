use super::chart::{chart_map_unwrapped, transition_jacobian, Chart, SpacetimePoint};
use super::metric::{metric, pullback};
use super::params::KerrParams;
use crate::error::Result;

/// Step of the centred differences in [`isometry_defect`].
pub const JACOBIAN_STEP: f64 = 1e-6;

fn conformal_weight(p: &SpacetimePoint) -> f64 {
    if p.chart.is_conformal() {
        p.coords[1] * p.coords[1]
    } else {
        1.0
    }
}

/// Largest componentwise mismatch `|g - J^T g' J| / (1 + |g|)` between the
/// metric at `from` and the pullback of the metric at its image in `to`.
/// Conformal charts are compared after removing the factor `w^2`.
pub fn isometry_defect(params: &KerrParams, from: &SpacetimePoint, to: Chart) -> Result<f64> {
    let image = chart_map_unwrapped(params, from, to)?;
    let jac = transition_jacobian(params, from, to, JACOBIAN_STEP)?;
    let gs = metric(params, from)?.cov;
    let gt = metric(params, &image)?.cov;
    let pb = pullback(&jac, &gt);
    let (cs, ct) = (conformal_weight(from), conformal_weight(&image));
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let a = gs[i][j] / cs;
            worst = worst.max((a - pb[i][j] / ct).abs() / (1.0 + a.abs()));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kerr_star_is_an_isometric_image() {
        let p = KerrParams::new(1.0, 0.4).unwrap();
        let pt = SpacetimePoint::new(Chart::BlI, [0.3, 4.0, 1.0, 0.2]);
        assert!(isometry_defect(&p, &pt, Chart::KerrStar).unwrap() < 1e-7);
    }
}
