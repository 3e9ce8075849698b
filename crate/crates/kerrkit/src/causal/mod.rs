//! Candidate Cauchy surfaces given as level sets `u = 0`, with the radial
//! profiles that define them, gradient norms `du . g^{-1} du` and reports on
//! how geodesic paths cross them.
//!
//! Profiles are evaluated for `M = 1` and rescaled; the piecewise profiles
//! are only Lipschitz at their junctions, so gradient norms refuse points
//! within [`KINK_GUARD`] of a junction.

mod crossing;
mod profiles;
mod surfaces;
mod survey;

pub use crossing::{crossing_report, crossing_report_with, CrossingReport, EndEstimate, DIVERGENCE_THRESHOLD, LOG_SLOPE_MIN};
pub use profiles::{radial_profiles, RadialProfiles, X_TILDE_EDGE};
pub use surfaces::{surface_gradient_norm, Region, Surface, SurfaceSpec, KINK_GUARD, Z_MIN_LEVEL};
pub use survey::{
    crossing_tally, gradient_survey, region_point, sample_paths, CrossingTally, GradientSurvey, PathBatch,
};
