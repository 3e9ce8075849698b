//! Numerical toolkit for the slowly rotating Kerr and Kerr–Kruskal spacetimes.
//!
//! The crate is organised around five areas:
//!
//! * [`geometry`]: parameters, horizon constants, charts, metrics, null tetrads
//!   and Killing-field norms.
//! * [`geodesics`]: first integrals, potentials, adaptive integration of null
//!   geodesics and their classification by the root structure of `R(r)`.
//! * [`photon_orbits`]: the spherical photon orbit locus and checks on it.
//! * [`causal`]: candidate Cauchy surfaces, their radial profiles, gradient
//!   norms and geodesic crossing reports.
//! * [`thermal`]: Fermi factors, the Mellin transform and half-line spectral
//!   projectors.
//!
//! All public entry points accept a general mass `M`. Where formulas are
//! naturally written for `M = 1` the input is rescaled internally using
//! `g_{a,M} = M^2 g_{a/M,1}`.

pub mod causal;
pub mod error;
pub mod geodesics;
pub mod geometry;
pub mod numeric;
pub mod photon_orbits;
pub mod sampling;
pub mod thermal;

pub use error::{KerrError, Result};
pub use geometry::{Chart, HorizonConstants, KerrParams, SpacetimePoint};

/// Library version embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
