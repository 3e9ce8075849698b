use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{KerrError, Result};

/// A uniform grid on the line or a log-uniform grid on the half-line. In both
/// cases the right end point is excluded, so the spacing is `span / n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    /// `x_j = -X + j 2X/n`.
    Line { half_width: f64, n: usize },
    /// `ln x_j = ln x_min + j ln(x_max/x_min)/n`.
    HalfLine { x_min: f64, x_max: f64, n: usize },
}

impl Domain {
    pub fn len(&self) -> usize {
        match *self {
            Domain::Line { n, .. } | Domain::HalfLine { n, .. } => n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Spacing in `x` on the line, in `ln x` on the half-line.
    pub fn spacing(&self) -> f64 {
        match *self {
            Domain::Line { half_width, n } => 2.0 * half_width / n as f64,
            Domain::HalfLine { x_min, x_max, n } => (x_max.ln() - x_min.ln()) / n as f64,
        }
    }

    /// First grid coordinate: `-X`, or `ln x_min`.
    pub fn origin(&self) -> f64 {
        match *self {
            Domain::Line { half_width, .. } => -half_width,
            Domain::HalfLine { x_min, .. } => x_min.ln(),
        }
    }

    pub fn points(&self) -> Vec<f64> {
        let (o, h) = (self.origin(), self.spacing());
        match self {
            Domain::Line { .. } => (0..self.len()).map(|j| o + j as f64 * h).collect(),
            Domain::HalfLine { .. } => (0..self.len()).map(|j| (o + j as f64 * h).exp()).collect(),
        }
    }

    /// Quadrature weights of the discrete `L^2(dx)` inner product.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.spacing();
        match self {
            Domain::Line { .. } => vec![h; self.len()],
            Domain::HalfLine { .. } => self.points().into_iter().map(|x| x * h).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        if n < 4 || !n.is_power_of_two() {
            return Err(KerrError::Grid(format!("grid size {n} is not a power of two >= 4")));
        }
        let ok = match *self {
            Domain::Line { half_width, .. } => half_width > 0.0 && half_width.is_finite(),
            Domain::HalfLine { x_min, x_max, .. } => x_min > 0.0 && x_max > x_min && x_max.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(KerrError::Grid(format!("degenerate grid {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub domain: Domain,
    pub values: Vec<Complex64>,
}

impl SampledFunction {
    pub fn new(domain: Domain, values: Vec<Complex64>) -> Result<Self> {
        domain.validate()?;
        if values.len() != domain.len() {
            return Err(KerrError::Grid(format!("{} values for {} grid points", values.len(), domain.len())));
        }
        Ok(SampledFunction { domain, values })
    }

    pub fn from_fn(domain: Domain, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        domain.validate()?;
        let values = domain.points().into_iter().map(f).collect();
        Ok(SampledFunction { domain, values })
    }

    pub fn from_real(domain: Domain, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn(domain, |x| Complex64::new(f(x), 0.0))
    }

    pub fn points(&self) -> Vec<f64> {
        self.domain.points()
    }

    /// `<self, other>`, antilinear in `self`.
    pub fn inner(&self, other: &SampledFunction) -> Result<Complex64> {
        self.same_grid(other)?;
        Ok(self
            .domain
            .weights()
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .map(|(w, (a, b))| a.conj() * b * *w)
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.domain
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &SampledFunction) -> Result<SampledFunction> {
        self.same_grid(other)?;
        Ok(SampledFunction {
            domain: self.domain,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn add(&self, other: &SampledFunction) -> Result<SampledFunction> {
        self.same_grid(other)?;
        Ok(SampledFunction {
            domain: self.domain,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }

    /// Grids match when kind and size agree and origin and spacing agree to
    /// rounding.
    fn same_grid(&self, other: &SampledFunction) -> Result<()> {
        let (a, b) = (&self.domain, &other.domain);
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1.0);
        let kind = matches!((a, b), (Domain::Line { .. }, Domain::Line { .. }) | (Domain::HalfLine { .. }, Domain::HalfLine { .. }));
        if kind && a.len() == b.len() && close(a.origin(), b.origin()) && close(a.spacing(), b.spacing()) {
            Ok(())
        } else {
            Err(KerrError::Grid(format!("grids differ: {:?} vs {:?}", self.domain, other.domain)))
        }
    }

    /// Four-point Lagrange interpolation in the grid coordinate (`ln x` on the
    /// half-line). Zero outside the grid.
    pub fn interpolate(&self, x: f64) -> Complex64 {
        let s = match self.domain {
            Domain::Line { .. } => x,
            Domain::HalfLine { .. } => {
                if x <= 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                x.ln()
            }
        };
        let n = self.values.len();
        let t = (s - self.domain.origin()) / self.domain.spacing();
        if !(t >= 0.0 && t <= (n - 1) as f64) {
            return Complex64::new(0.0, 0.0);
        }
        let i = (t.floor() as usize).clamp(1, n - 3);
        let d = t - i as f64;
        let v = &self.values;
        let w = [
            -d * (d - 1.0) * (d - 2.0) / 6.0,
            (d + 1.0) * (d - 1.0) * (d - 2.0) / 2.0,
            -(d + 1.0) * d * (d - 2.0) / 2.0,
            (d + 1.0) * d * (d - 1.0) / 6.0,
        ];
        v[i - 1] * w[0] + v[i] * w[1] + v[i + 1] * w[2] + v[i + 2] * w[3]
    }
}

/// Named test-function families for run configurations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum TestFunction {
    /// `exp(-((ln x - center)/width)^2)`, half-line only.
    LogGaussian { center: f64, width: f64 },
    /// `exp(-((x - center)/width)^2)`.
    Gaussian { center: f64, width: f64 },
    /// Smooth bump supported on `(lo, hi)`, equal to 1 at the midpoint.
    Bump { lo: f64, hi: f64 },
}

impl TestFunction {
    pub const LOG_GAUSSIAN: TestFunction = TestFunction::LogGaussian { center: 0.0, width: 1.0 };

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            TestFunction::LogGaussian { center, width } => {
                if x <= 0.0 {
                    0.0
                } else {
                    (-((x.ln() - center) / width).powi(2)).exp()
                }
            }
            TestFunction::Gaussian { center, width } => (-((x - center) / width).powi(2)).exp(),
            TestFunction::Bump { lo, hi } => {
                let s = (2.0 * x - lo - hi) / (hi - lo);
                if s.abs() >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - s * s)).exp()
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            TestFunction::LogGaussian { width, .. } | TestFunction::Gaussian { width, .. } => width > 0.0,
            TestFunction::Bump { lo, hi } => hi > lo,
        };
        if ok {
            Ok(())
        } else {
            Err(KerrError::InvalidArgument(format!("degenerate test function {self:?}")))
        }
    }

    pub fn sample(&self, domain: Domain) -> Result<SampledFunction> {
        self.validate()?;
        SampledFunction::from_real(domain, |x| self.eval(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halfline_norm_uses_x_weights() {
        // int_0^inf e^{-2x} dx = 1/2
        let d = Domain::HalfLine { x_min: 1e-12, x_max: 60.0, n: 4096 };
        let f = SampledFunction::from_real(d, |x| (-x).exp()).unwrap();
        assert!((f.norm().powi(2) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn interpolation_is_exact_for_cubics() {
        let d = Domain::Line { half_width: 2.0, n: 16 };
        let f = SampledFunction::from_real(d, |x| x * x * x - x).unwrap();
        let z = f.interpolate(0.3141);
        assert!((z.re - (0.3141f64.powi(3) - 0.3141)).abs() < 1e-12);
        assert_eq!(f.interpolate(5.0).re, 0.0);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(Domain::Line { half_width: 1.0, n: 100 }.validate().is_err());
        assert!(SampledFunction::new(Domain::Line { half_width: 1.0, n: 8 }, vec![]).is_err());
    }
}
