//! Null geodesics: first integrals, the separated potentials, adaptive
//! integration with event detection, and classification by the root
//! structure of the radial potential `R`.
//!
//! The integrator evolves `(t, r, theta, phi)` together with
//! `u_r = rho^2 dr/ds` and `u_theta = rho^2 dtheta/ds` using the second-order
//! form `du_r/ds = R'(r) / (2 rho^2)`, so simple turning points need no
//! special treatment. Near the future horizon the path can be continued in
//! the Kerr-star chart.

mod classify;
mod integrals;
mod integrator;

pub use classify::{
    classify, classify_by_integration, future_oriented, Block, Endpoint, GeodesicType, Horizon, StartCondition,
};
pub use integrals::{
    angular_potential, angular_potential_derivative, integrals_from_velocity, p_function, potentials,
    radial_potential, radial_potential_derivative, radial_potential_expanded, radial_scale, velocity_from_integrals,
    FirstIntegrals, Potentials,
};
pub use integrator::{
    integrate, integrate_maximal, EventKind, GeodesicPath, GeodesicState, IntegrationConfig, PathEvent, PathRow,
    PathSample,
};
