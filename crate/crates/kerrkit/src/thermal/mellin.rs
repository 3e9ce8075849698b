use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::sampled::{Domain, SampledFunction};
use crate::error::{KerrError, Result};

/// Relative size allowed at the grid ends.
pub const DECAY_TOL: f64 = 1e-8;

fn end_ratio(values: &[Complex64]) -> f64 {
    let max = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    let n = values.len();
    [values[0], values[1], values[n - 2], values[n - 1]].iter().map(|v| v.norm()).fold(0.0, f64::max) / max
}

fn alternate(v: &mut [Complex64]) {
    for z in v.iter_mut().skip(1).step_by(2) {
        *z = -*z;
    }
}

/// Mellin transform `(2 pi)^{-1/2} int x^{-1/2 - i sigma} f(x) dx`.
///
/// With `x = e^u` this is the unitary Fourier transform of `e^{u/2} f(e^u)`,
/// evaluated by FFT on `sigma_k = -pi/h + k 2pi/(N h)`. The discrete map is
/// exactly unitary between the half-line and line inner products.
pub fn mellin(f: &SampledFunction) -> Result<SampledFunction> {
    let Domain::HalfLine { n, .. } = f.domain else {
        return Err(KerrError::Grid("mellin needs a half-line grid".into()));
    };
    f.domain.validate()?;
    let (u0, h) = (f.domain.origin(), f.domain.spacing());
    let mut g: Vec<Complex64> = f.points().iter().zip(&f.values).map(|(x, v)| v * x.sqrt()).collect();
    let ratio = end_ratio(&g);
    if ratio > DECAY_TOL {
        return Err(KerrError::InsufficientDecay { ratio });
    }
    alternate(&mut g);
    FftPlanner::new().plan_fft_forward(n).process(&mut g);
    let out = Domain::Line { half_width: PI / h, n };
    let c = h / (2.0 * PI).sqrt();
    for (s, z) in out.points().iter().zip(g.iter_mut()) {
        *z *= Complex64::from_polar(c, -s * u0);
    }
    let ratio = end_ratio(&g);
    if ratio > DECAY_TOL {
        return Err(KerrError::Grid(format!("log grid too coarse: spectrum at Nyquist is {ratio:e} of peak")));
    }
    SampledFunction::new(out, g)
}

/// Inverse of [`mellin`] back onto the half-line grid starting at `x_min`.
pub fn mellin_inverse(spectrum: &SampledFunction, x_min: f64) -> Result<SampledFunction> {
    let Domain::Line { half_width, n } = spectrum.domain else {
        return Err(KerrError::Grid("mellin_inverse needs a line grid in sigma".into()));
    };
    spectrum.domain.validate()?;
    if !(x_min > 0.0) {
        return Err(KerrError::Grid(format!("x_min must be positive, got {x_min}")));
    }
    let h = PI / half_width;
    let u0 = x_min.ln();
    let ds = spectrum.domain.spacing();
    let mut g: Vec<Complex64> = spectrum
        .points()
        .iter()
        .zip(&spectrum.values)
        .map(|(s, v)| v * Complex64::from_polar(1.0, s * u0))
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut g);
    alternate(&mut g);
    let dom = Domain::HalfLine { x_min, x_max: (u0 + n as f64 * h).exp(), n };
    let c = ds / (2.0 * PI).sqrt();
    for (x, z) in dom.points().iter().zip(g.iter_mut()) {
        *z *= c / x.sqrt();
    }
    SampledFunction::new(dom, g)
}
