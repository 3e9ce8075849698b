use serde::{Deserialize, Serialize};

use super::chart::{Chart, RadialFunctions, SpacetimePoint};
use super::metric::metric;
use super::params::{horizon_quantities, KerrParams};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KillingField {
    /// `d_t`
    #[serde(rename = "V_I")]
    VI,
    /// `d_t + Omega_H d_phi`
    #[serde(rename = "V_H")]
    VH,
    #[serde(rename = "D_PHI")]
    DPhi,
}

/// Components of the Killing field in the chart of `point`.
pub fn killing_vector(params: &KerrParams, field: KillingField, point: &SpacetimePoint) -> Result<[f64; 4]> {
    let om = horizon_quantities(params)?.omega_h;
    let dphi = [0.0, 0.0, 0.0, 1.0];
    let dt = match point.chart {
        Chart::Kbl => {
            let k = RadialFunctions::new(params).kappa;
            [-k * point.coords[0], k * point.coords[1], 0.0, -om]
        }
        _ => [1.0, 0.0, 0.0, 0.0],
    };
    Ok(match field {
        KillingField::VI => dt,
        KillingField::DPhi => dphi,
        KillingField::VH => [dt[0], dt[1], dt[2], dt[3] + om],
    })
}

/// `g(v, v)` for the physical metric (conformal charts are rescaled back).
pub fn killing_norm(params: &KerrParams, field: KillingField, point: &SpacetimePoint) -> Result<f64> {
    let v = killing_vector(params, field, point)?;
    let g = metric(params, point)?;
    let n = g.norm(&v);
    Ok(if point.chart.is_conformal() { n / (point.coords[1] * point.coords[1]) } else { n })
}

/// Timelike and future directed, with the time orientation fixed by `-grad t`
/// in the exterior block. Only BL_I points are accepted.
pub fn is_future_timelike(params: &KerrParams, field: KillingField, point: &SpacetimePoint) -> Result<bool> {
    let mut p = *point;
    if p.chart != Chart::BlI {
        p = super::chart::chart_map(params, point, Chart::BlI)?;
    }
    let v = killing_vector(params, field, &p)?;
    let g = metric(params, &p)?;
    let norm = g.norm(&v);
    // g(v, -grad t) = -dt(v)
    let minus_grad_t = [-g.contra[0][0], -g.contra[1][0], -g.contra[2][0], -g.contra[3][0]];
    Ok(norm < 0.0 && g.dot(&v, &minus_grad_t) < 0.0)
}
