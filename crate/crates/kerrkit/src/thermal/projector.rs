use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::fermi::{fermi_factor, Sign, ThermalParams};
use super::mellin::{mellin, mellin_inverse};
use super::sampled::{Domain, SampledFunction, TestFunction};
use crate::error::{KerrError, Result};

/// Largest relative change allowed when the padding is doubled.
pub const ALIASING_TOL: f64 = 1e-6;
/// `f` is treated as zero beyond the last point where `|f|` exceeds this
/// fraction of its maximum.
pub const WINDOW_TOL: f64 = 1e-14;
/// Half-width in `ln x` of the standard log grid.
pub const LOG_SPAN: f64 = 40.0;

/// `chi^+-_{2 pi}(sigma) = (1 + exp(-+ 2 pi sigma))^-1`.
pub fn dilation_multiplier(sign: Sign, sigma: f64) -> f64 {
    fermi_factor(2.0 * PI, sign, sigma)
}

/// The standard log grid `[e^-40, e^40]` with `n` points.
pub fn standard_halfline(n: usize) -> Domain {
    Domain::HalfLine { x_min: (-LOG_SPAN).exp(), x_max: LOG_SPAN.exp(), n }
}

/// `chi^+-_{2 pi}(A)` applied through the Mellin transform. This is the
/// default evaluation of the compressed half-line projector.
pub fn halfline_projector(f: &SampledFunction, sign: Sign) -> Result<SampledFunction> {
    let Domain::HalfLine { x_min, .. } = f.domain else {
        return Err(KerrError::Grid("halfline_projector needs a half-line grid".into()));
    };
    let mut m = mellin(f)?;
    for (s, z) in m.points().iter().zip(m.values.iter_mut()) {
        *z *= dilation_multiplier(sign, *s);
    }
    let out = mellin_inverse(&m, x_min)?;
    Ok(SampledFunction { domain: f.domain, values: out.values })
}

/// Inverse DTFT of the indicator of `(0, pi)` or `(-pi, 0)`.
fn lattice_kernel(sign: Sign, n: i64) -> Complex64 {
    if n == 0 {
        Complex64::new(0.5, 0.0)
    } else if n % 2 == 0 {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::new(0.0, sign.value() / (PI * n as f64))
    }
}

/// Sharp frequency cutoff on `l^2(Z)` restricted to the window, evaluated as
/// a linear convolution by FFT. `padding >= 2` makes the result independent
/// of the padding up to rounding.
pub fn lattice_projector(values: &[Complex64], sign: Sign, padding: usize) -> Result<Vec<Complex64>> {
    let p = values.len();
    if padding < 2 || p == 0 {
        return Err(KerrError::Grid(format!("padding {padding} < 2 or empty input")));
    }
    let l = (p * padding).next_power_of_two();
    let mut a = vec![Complex64::new(0.0, 0.0); l];
    a[..p].copy_from_slice(values);
    let half = (l / 2) as i64;
    let mut k: Vec<Complex64> = (0..l as i64)
        .map(|m| lattice_kernel(sign, if m < half { m } else { m - l as i64 }))
        .collect();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(l);
    fwd.process(&mut a);
    fwd.process(&mut k);
    for (x, y) in a.iter_mut().zip(&k) {
        *x *= y;
    }
    planner.plan_fft_inverse(l).process(&mut a);
    let scale = 1.0 / l as f64;
    Ok(a[..p].iter().map(|z| z * scale).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierSettings {
    pub padding: usize,
    /// Right end of the uniform lattice; chosen from the data when absent.
    pub window: Option<f64>,
    /// Lattice size; the input grid size when absent.
    pub points: Option<usize>,
}

impl Default for FourierSettings {
    fn default() -> Self {
        FourierSettings { padding: 4, window: None, points: None }
    }
}

/// Output of the Fourier route on `[-W, W]`. The restriction to the
/// half-line is the part with `x >= 0`; the negative half is kept so that
/// interpolation near `x = 0` stays accurate.
#[derive(Debug, Clone)]
pub struct FourierRoute {
    pub projected: SampledFunction,
    pub window: f64,
    pub aliasing_discrepancy: f64,
}

fn auto_window(f: &SampledFunction) -> Result<f64> {
    let cut = WINDOW_TOL * f.max_abs();
    f.points()
        .iter()
        .zip(&f.values)
        .filter(|(_, v)| v.norm() > cut)
        .map(|(x, _)| *x)
        .last()
        .ok_or_else(|| KerrError::Grid("function vanishes on the grid".into()))
}

/// Zero extension to the line, sharp cutoff, restriction to the half-line.
/// The half-line samples are interpolated onto a uniform lattice on
/// `[-W, W)`, zero for `x < 0`; the result is rejected if doubling the padding moves it by more
/// than [`ALIASING_TOL`].
pub fn fourier_route(f: &SampledFunction, sign: Sign, settings: &FourierSettings) -> Result<FourierRoute> {
    if !matches!(f.domain, Domain::HalfLine { .. }) {
        return Err(KerrError::Grid("fourier_route needs a half-line grid".into()));
    }
    let window = match settings.window {
        Some(w) => w,
        None => auto_window(f)?,
    };
    let p = settings.points.unwrap_or(f.values.len());
    let out = Domain::Line { half_width: window, n: 2 * p };
    out.validate()?;
    let dx = window / p as f64;
    let lattice: Vec<Complex64> = out.points().iter().map(|x| f.interpolate(*x)).collect();
    let a = lattice_projector(&lattice, sign, settings.padding)?;
    let b = lattice_projector(&lattice, sign, 2 * settings.padding)?;
    let na = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let diff = a.iter().zip(&b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let aliasing_discrepancy = if na > 0.0 { diff / na } else { 0.0 };
    if aliasing_discrepancy > ALIASING_TOL {
        return Err(KerrError::Aliasing { discrepancy: aliasing_discrepancy });
    }
    debug_assert!((out.spacing() - dx).abs() <= 1e-12 * dx);
    let values = a;
    Ok(FourierRoute { projected: SampledFunction::new(out, values)?, window, aliasing_discrepancy })
}

#[derive(Debug, Clone)]
pub struct RouteComparison {
    pub mellin: SampledFunction,
    pub fourier: FourierRoute,
    /// `||P_Fourier f - P_Mellin f|| / ||f||` over the lattice window.
    pub residual: f64,
}

/// Both evaluations of the half-line projector and their discrepancy. The
/// Mellin result is interpolated onto the lattice.
pub fn compare_routes(f: &SampledFunction, sign: Sign, settings: &FourierSettings) -> Result<RouteComparison> {
    let mel = halfline_projector(f, sign)?;
    let four = fourier_route(f, sign, settings)?;
    let dx = four.projected.domain.spacing();
    let err: f64 = four
        .projected
        .points()
        .iter()
        .zip(&four.projected.values)
        .filter(|(x, _)| **x > 0.0)
        .map(|(x, v)| (v - mel.interpolate(*x)).norm_sqr() * dx)
        .sum();
    let norm = f.norm();
    if norm == 0.0 {
        return Err(KerrError::InvalidArgument("zero function".into()));
    }
    Ok(RouteComparison { mellin: mel, fourier: four, residual: err.sqrt() / norm })
}

/// Route discrepancy for `P+` on the standard log grid with `n` points and an
/// `n`-point lattice.
pub fn route_residual(test: &TestFunction, n: usize) -> Result<f64> {
    let f = test.sample(standard_halfline(n))?;
    Ok(compare_routes(&f, Sign::Plus, &FourierSettings::default())?.residual)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelCheck {
    pub points: usize,
    /// Regularisation in lattice spacings.
    pub delta: f64,
    pub compared: usize,
    pub max_rel_error: f64,
}

/// Applies the lattice projector to a sampled Poisson kernel of width
/// `delta = 2` spacings centred mid-lattice. The exact image is
/// `+-i / (2 pi (x - y +- i delta))`, the kernel of the cutoff as an operator
/// on `L^2(dy)`. Points with `4 <= |x - y| <= points/8` are compared.
pub fn kernel_row_check(points: usize, sign: Sign) -> Result<KernelCheck> {
    let delta = 2.0;
    let c = (points / 2) as f64;
    let poisson: Vec<Complex64> = (0..points)
        .map(|j| {
            let z = j as f64 - c;
            Complex64::new(delta / (PI * (z * z + delta * delta)), 0.0)
        })
        .collect();
    let row = lattice_projector(&poisson, sign, 4)?;
    let s = sign.value();
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    for (j, v) in row.iter().enumerate() {
        let z = j as f64 - c;
        if z.abs() < 4.0 || z.abs() > (points / 8) as f64 {
            continue;
        }
        let exact = Complex64::new(0.0, s) / (2.0 * PI * Complex64::new(z, s * delta));
        worst = worst.max((v - exact).norm() / exact.norm());
        compared += 1;
    }
    Ok(KernelCheck { points, delta, compared, max_rel_error: worst })
}

/// `m(D_u) f` on the line by FFT. The Nyquist bin gets the mean of `m(+-xi)`.
pub fn line_multiplier(f: &SampledFunction, m: impl Fn(f64) -> f64) -> Result<SampledFunction> {
    let Domain::Line { n, .. } = f.domain else {
        return Err(KerrError::Grid("line_multiplier needs a line grid".into()));
    };
    let du = f.domain.spacing();
    let mut buf = f.values.clone();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    for (k, z) in buf.iter_mut().enumerate() {
        let kk = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
        let xi = 2.0 * PI * kk / (n as f64 * du);
        *z *= if k == n / 2 { 0.5 * (m(xi) + m(-xi)) } else { m(xi) } / n as f64;
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    SampledFunction::new(f.domain, buf)
}

/// Inverse of the exponential change of variables: `U = e^{-kappa u}` and
/// `F(U) = (kappa U)^{-1/2} f(u)`. Unitary between the discrete norms.
pub fn to_exponential(kappa: f64, f: &SampledFunction) -> Result<SampledFunction> {
    ThermalParams::new(kappa)?;
    let Domain::Line { half_width, n } = f.domain else {
        return Err(KerrError::Grid("to_exponential needs a line grid".into()));
    };
    let du = f.domain.spacing();
    let dom = Domain::HalfLine {
        x_min: (-kappa * (half_width - du)).exp(),
        x_max: (kappa * (half_width + du)).exp(),
        n,
    };
    let values = dom
        .points()
        .iter()
        .zip(f.values.iter().rev())
        .map(|(u, v)| v / (kappa * u).sqrt())
        .collect();
    SampledFunction::new(dom, values)
}

/// `f(u) = (kappa U)^{1/2} F(e^{-kappa u})` on a grid made by
/// [`to_exponential`].
pub fn from_exponential(kappa: f64, g: &SampledFunction) -> Result<SampledFunction> {
    ThermalParams::new(kappa)?;
    let Domain::HalfLine { n, .. } = g.domain else {
        return Err(KerrError::Grid("from_exponential needs a half-line grid".into()));
    };
    let du = g.domain.spacing() / kappa;
    let half_width = 0.5 * n as f64 * du;
    let expect = -kappa * (half_width - du);
    if (g.domain.origin() - expect).abs() > 1e-9 * expect.abs().max(1.0) {
        return Err(KerrError::Grid("half-line grid is not the image of a symmetric line grid".into()));
    }
    let values = g
        .points()
        .iter()
        .zip(&g.values)
        .rev()
        .map(|(u, v)| v * (kappa * u).sqrt())
        .collect();
    SampledFunction::new(Domain::Line { half_width, n }, values)
}

/// Relative discrepancy between `chi^+_inf(D_U)` pulled back to the `u` line
/// and `chi^-_beta(D_u)` with `beta = 2 pi / kappa`.
pub fn unruh_identity_residual(kappa: f64, f: &SampledFunction) -> Result<f64> {
    unruh_identity_residual_with(kappa, f, Sign::Plus)
}

/// As [`unruh_identity_residual`], for the projector of the given sign; the
/// Fermi factor on the `u` side has the opposite sign.
pub fn unruh_identity_residual_with(kappa: f64, f: &SampledFunction, sign: Sign) -> Result<f64> {
    let tp = ThermalParams::new(kappa)?;
    let projected = halfline_projector(&to_exponential(kappa, f)?, sign)?;
    let pulled = from_exponential(kappa, &projected)?;
    let direct = line_multiplier(f, |xi| tp.chi(sign.flip(), xi))?;
    let norm = f.norm();
    if norm == 0.0 {
        return Err(KerrError::InvalidArgument("zero function".into()));
    }
    Ok(SampledFunction { domain: f.domain, values: pulled.values }.sub(&direct)?.norm() / norm)
}

/// The same identity with the `U`-side projector evaluated by the lattice
/// route on `points` lattice points. Only `u` with `U` inside the lattice
/// window enter the comparison.
pub fn unruh_lattice_residual(kappa: f64, f: &SampledFunction, sign: Sign, points: usize) -> Result<f64> {
    let tp = ThermalParams::new(kappa)?;
    let g = to_exponential(kappa, f)?;
    let route = fourier_route(&g, sign, &FourierSettings { points: Some(points), ..Default::default() })?;
    let direct = line_multiplier(f, |xi| tp.chi(sign.flip(), xi))?;
    let du = f.domain.spacing();
    let (mut err, mut norm) = (0.0, 0.0);
    for (u, d) in f.points().iter().zip(&direct.values) {
        let big_u = (-kappa * u).exp();
        if big_u >= route.window {
            continue;
        }
        let v = route.projected.interpolate(big_u) * (kappa * big_u).sqrt();
        err += (v - d).norm_sqr() * du;
        norm += d.norm_sqr() * du;
    }
    if norm == 0.0 {
        return Err(KerrError::InvalidArgument("projection vanishes inside the lattice window".into()));
    }
    Ok((err / norm).sqrt())
}

/// Gaussian `exp(-(4 kappa u - 0.3)^2)` on `[-50/kappa, 50/kappa]`. Its
/// image under `U = e^{-kappa u}` does not depend on `kappa`.
pub fn unruh_test_function(kappa: f64, n: usize) -> Result<SampledFunction> {
    ThermalParams::new(kappa)?;
    SampledFunction::from_real(Domain::Line { half_width: 50.0 / kappa, n }, |u| (-(4.0 * kappa * u - 0.3).powi(2)).exp())
}
