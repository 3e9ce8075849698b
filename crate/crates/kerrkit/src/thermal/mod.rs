//! Fermi factors, the Mellin transform and the half-line spectral projector.
//!
//! For `f` on `(0, inf)`, extended by zero to the line, the compression of
//! `1_{R+-}(D_x)` to the half-line equals `chi^+-_{2 pi}(A)` with the
//! dilation generator `A = -i (x d/dx + 1/2)` and
//! `chi^+-_beta(s) = (1 + exp(-+ beta s))^-1`. Two evaluations are provided:
//!
//! * the Mellin route ([`halfline_projector`]), which diagonalises `A`;
//! * the Fourier route ([`fourier_route`]), which applies the sharp cutoff on
//!   a uniform lattice.
//!
//! Under `U = e^{-kappa u}` with the half-density factor `(kappa U)^{-1/2}`,
//! `chi^+_inf(D_U)` becomes `chi^-_beta(D_u)` with `beta = 2 pi / kappa`;
//! [`unruh_identity_residual`] measures this numerically.
//!
//! The compressed operator is not idempotent: its Mellin multiplier takes
//! values strictly between 0 and 1.

mod fermi;
mod mellin;
mod projector;
mod sampled;

pub use fermi::{fermi_factor, Sign, ThermalParams};
pub use mellin::{mellin, mellin_inverse, DECAY_TOL};
pub use projector::{
    compare_routes, dilation_multiplier, fourier_route, from_exponential, halfline_projector,
    kernel_row_check, lattice_projector, line_multiplier, route_residual, standard_halfline,
    to_exponential, unruh_identity_residual, unruh_identity_residual_with, unruh_lattice_residual, unruh_test_function,
    FourierRoute, FourierSettings,
    KernelCheck, RouteComparison, ALIASING_TOL, LOG_SPAN, WINDOW_TOL,
};
pub use sampled::{Domain, SampledFunction, TestFunction};
