//! Kerr parameters, horizon constants, charts, metrics, null tetrads and
//! Killing-field norms.

mod chart;
mod isometry;
mod killing;
mod metric;
mod params;
mod tetrad;

pub use chart::{
    chart_map, chart_map_unwrapped, conformal_epsilon, transition, transition_jacobian, validate_point,
    wedge_reflection, Chart, RadialFunctions, SpacetimePoint, Transition,
};
pub use isometry::{isometry_defect, JACOBIAN_STEP};
pub use killing::{is_future_timelike, killing_norm, killing_vector, KillingField};
pub use metric::{bilinear, metric, pullback, Mat4, MetricTensor, AXIS_GUARD, CONDITIONING_TOL};
pub use params::{horizon_quantities, HorizonConstants, KerrParams};
pub use tetrad::{null_tetrad, null_tetrad_with_metric, NullTetrad, TetradKind, TetradResiduals};
