use thiserror::Error;

use crate::geometry::Chart;

pub type Result<T> = std::result::Result<T, KerrError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KerrError {
    #[error("invalid Kerr parameters M={mass}, a={spin}: need M > 0 and |a| < M")]
    InvalidParams { mass: f64, spin: f64 },

    #[error("axis singularity at theta={theta} (sin(theta) <= 1e-8)")]
    AxisSingularity { theta: f64 },

    #[error("horizon coordinate singularity in {chart:?} at r={r} (Delta = 0)")]
    HorizonSingularity { chart: Chart, r: f64 },

    #[error("point {coords:?} lies outside the domain of {chart:?}: {reason}")]
    OutsideDomain { chart: Chart, coords: [f64; 4], reason: &'static str },

    #[error("no overlap between {from:?} and {to:?} at {coords:?}")]
    OutsideOverlap { from: Chart, to: Chart, coords: [f64; 4] },

    #[error("radius equation not bracketed for U={u}, V={v}")]
    RootNotBracketed { u: f64, v: f64 },

    #[error("ill-conditioned metric: |g_inv g - 1| = {deviation:e}")]
    IllConditioned { deviation: f64 },

    #[error("tetrad kind {kind} requires chart {expected:?}, got {got:?}")]
    ChartMismatch { kind: &'static str, expected: Chart, got: Chart },

    #[error("forbidden region: {which} potential is negative ({value:e})")]
    ForbiddenRegion { which: &'static str, value: f64 },

    #[error("velocity is not null: g(v,v) = {norm:e}")]
    NotNull { norm: f64 },

    #[error("inadmissible first integrals: {0}")]
    Inadmissible(String),

    #[error("step size underflow at affine parameter {affine}")]
    StepUnderflow { affine: f64 },

    #[error("classification ambiguous: {0}")]
    Ambiguous(String),

    #[error("quadrature failed to converge on [{lo}, {hi}]")]
    Quadrature { lo: f64, hi: f64 },

    #[error("bracket failure: {0}")]
    Bracket(String),

    #[error("point within {dist:e} of a profile kink at r={r}")]
    KinkProximity { r: f64, dist: f64 },

    #[error("insufficient decay at grid ends: ratio {ratio:e}")]
    InsufficientDecay { ratio: f64 },

    #[error("grid error: {0}")]
    Grid(String),

    #[error("aliasing detected: padding discrepancy {discrepancy:e}")]
    Aliasing { discrepancy: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
