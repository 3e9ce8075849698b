use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use super::chart::{validate_point, Chart, RadialFunctions, SpacetimePoint};
use super::params::KerrParams;
use crate::error::{KerrError, Result};

pub type Mat4 = [[f64; 4]; 4];

/// Smallest admissible `sin(theta)` for components carrying `sin^-2`.
pub const AXIS_GUARD: f64 = 1e-8;
/// Largest tolerated `|g g^-1 - 1|` before reporting ill-conditioning.
pub const CONDITIONING_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricTensor {
    pub cov: Mat4,
    pub contra: Mat4,
    pub det: f64,
}

impl MetricTensor {
    pub fn norm(&self, v: &[f64; 4]) -> f64 {
        bilinear(&self.cov, v, v)
    }

    pub fn dot(&self, u: &[f64; 4], v: &[f64; 4]) -> f64 {
        bilinear(&self.cov, u, v)
    }

    pub fn lower(&self, v: &[f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i] += self.cov[i][j] * v[j];
            }
        }
        out
    }

    /// `w . g^-1 w` for a covector `w`.
    pub fn conorm(&self, w: &[f64; 4]) -> f64 {
        bilinear(&self.contra, w, w)
    }

    /// Max entry of `cov * contra - 1`.
    pub fn inverse_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let mut s = 0.0;
                for k in 0..4 {
                    s += self.cov[i][k] * self.contra[k][j];
                }
                let id = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - id).abs());
            }
        }
        worst
    }
}

pub fn bilinear(m: &Mat4, u: &[f64; 4], v: &[f64; 4]) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            s += u[i] * m[i][j] * v[j];
        }
    }
    s
}

fn sym(m: &mut Mat4, i: usize, j: usize, v: f64) {
    m[i][j] = v;
    m[j][i] = v;
}

fn bl_like_cov(p: &KerrParams, r: f64, theta: f64) -> Mat4 {
    let (m, a) = (p.mass, p.spin);
    let s2 = theta.sin().powi(2);
    let rho2 = p.rho2(r, theta);
    let mut g = [[0.0; 4]; 4];
    g[0][0] = -(1.0 - 2.0 * m * r / rho2);
    sym(&mut g, 0, 3, -2.0 * m * a * r * s2 / rho2);
    g[3][3] = (r * r + a * a + 2.0 * m * a * a * r * s2 / rho2) * s2;
    g[2][2] = rho2;
    g
}

fn bl_cov(p: &KerrParams, r: f64, theta: f64) -> Mat4 {
    let mut g = bl_like_cov(p, r, theta);
    g[1][1] = p.rho2(r, theta) / p.delta(r);
    g
}

fn bl_contra(p: &KerrParams, r: f64, theta: f64) -> Mat4 {
    let (m, a) = (p.mass, p.spin);
    let s2 = theta.sin().powi(2);
    let rho2 = p.rho2(r, theta);
    let d = p.delta(r);
    let mut g = [[0.0; 4]; 4];
    g[0][0] = -p.sigma2(r, theta) / (d * rho2);
    sym(&mut g, 0, 3, -2.0 * a * m * r / (d * rho2));
    g[3][3] = (d - a * a * s2) / (d * rho2 * s2);
    g[1][1] = d / rho2;
    g[2][2] = 1.0 / rho2;
    g
}

/// Kerr-star (`sign = 1`) or star-Kerr (`sign = -1`) covariant metric.
fn star_cov(p: &KerrParams, r: f64, theta: f64, sign: f64) -> Mat4 {
    let mut g = bl_like_cov(p, r, theta);
    sym(&mut g, 0, 1, sign);
    sym(&mut g, 1, 3, -sign * p.spin * theta.sin().powi(2));
    g
}

fn star_contra(p: &KerrParams, r: f64, theta: f64, sign: f64) -> Mat4 {
    let a = p.spin;
    let s2 = theta.sin().powi(2);
    let rho2 = p.rho2(r, theta);
    let mut g = [[0.0; 4]; 4];
    g[0][0] = a * a * s2 / rho2;
    sym(&mut g, 0, 1, sign * (r * r + a * a) / rho2);
    g[1][1] = p.delta(r) / rho2;
    sym(&mut g, 0, 3, a / rho2);
    sym(&mut g, 1, 3, sign * a / rho2);
    g[3][3] = 1.0 / (rho2 * s2);
    g[2][2] = 1.0 / rho2;
    g
}

/// Conformal metric `w^2 g` in `(t*, w, theta, phi*)` (`sign = 1`) or
/// `(*t, w, theta, *phi)` (`sign = -1`).
pub(crate) fn conformal_cov(p: &KerrParams, w: f64, theta: f64, sign: f64) -> Mat4 {
    let (m, a) = (p.mass, p.spin);
    let s2 = theta.sin().powi(2);
    let c = theta.cos();
    let h = 1.0 + a * a * w * w * c * c;
    let w3 = w * w * w;
    let mut g = [[0.0; 4]; 4];
    g[0][0] = -(w * w - 2.0 * m * w3 / h);
    sym(&mut g, 0, 3, -2.0 * m * a * w3 * s2 / h);
    g[3][3] = (1.0 + a * a * w * w + 2.0 * m * a * a * w3 * s2 / h) * s2;
    g[2][2] = h;
    sym(&mut g, 0, 1, -sign);
    sym(&mut g, 1, 3, sign * a * s2);
    g
}

fn conformal_contra(p: &KerrParams, w: f64, theta: f64, sign: f64) -> Mat4 {
    let (m, a) = (p.mass, p.spin);
    let s2 = theta.sin().powi(2);
    let c = theta.cos();
    let h = 1.0 + a * a * w * w * c * c;
    let f = 1.0 - 2.0 * m * w + a * a * w * w;
    let mut g = [[0.0; 4]; 4];
    g[0][0] = a * a * s2 / h;
    sym(&mut g, 0, 1, -sign * (1.0 + a * a * w * w) / h);
    g[1][1] = w * w * f / h;
    sym(&mut g, 0, 3, a / h);
    sym(&mut g, 1, 3, -sign * a * w * w / h);
    g[3][3] = 1.0 / (h * s2);
    g[2][2] = 1.0 / h;
    g
}

/// KBL covariant metric at `(U, V, theta)` with `r` already solved.
pub(crate) fn kbl_cov(p: &KerrParams, rf: &RadialFunctions, u: f64, v: f64, r: f64, theta: f64) -> Mat4 {
    let a = p.spin;
    let m = p.mass;
    let (rp, rm, k) = (rf.rp, rf.rm, rf.kappa);
    let s2 = theta.sin().powi(2);
    let rho2 = p.rho2(r, theta);
    let rho2p = p.rho2(rp, theta);
    let ra = r * r + a * a;
    let rpa = rp * rp + a * a;
    let g = rf.g(r);
    let k2 = k * k;
    let c_sq = g * g * a * a * s2 / (4.0 * k2 * rho2) * (r - rm) * (r + rp) / (ra * rpa)
        * (rho2 / ra + rho2p / rpa);
    let c_uv = g * (r - rm) / (2.0 * k2 * rho2) * (rho2 * rho2 / (ra * ra) + rho2p * rho2p / (rpa * rpa));
    let c_x = g * a * s2 / (k * rho2 * rpa) * (rho2p * (r - rm) + ra * (r + rp));
    // completes the pullback of the exterior metric: e (U dV - V dU)^2
    let e = g * g * a * a * s2 * (r + rp).powi(2) / (4.0 * k2 * rpa * rpa * rho2);
    let mut out = [[0.0; 4]; 4];
    out[0][0] = (c_sq + e) * v * v;
    out[1][1] = (c_sq + e) * u * u;
    sym(&mut out, 0, 1, 0.5 * c_uv - e * u * v);
    sym(&mut out, 1, 3, 0.5 * c_x * u);
    sym(&mut out, 0, 3, -0.5 * c_x * v);
    out[2][2] = rho2;
    out[3][3] = (ra + 2.0 * m * r * a * a * s2 / rho2) * s2;
    out
}

fn invert(cov: &Mat4) -> Result<(Mat4, f64)> {
    let m = Matrix4::from_fn(|i, j| cov[i][j]);
    let det = m.determinant();
    let inv = m.try_inverse().ok_or(KerrError::IllConditioned { deviation: f64::INFINITY })?;
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = 0.5 * (inv[(i, j)] + inv[(j, i)]);
        }
    }
    Ok((out, det))
}

/// Covariant and contravariant metric with determinant at `point`.
pub fn metric(params: &KerrParams, point: &SpacetimePoint) -> Result<MetricTensor> {
    params.validate()?;
    let c = point.coords;
    let theta = c[2];
    if theta.sin().abs() <= AXIS_GUARD {
        return Err(KerrError::AxisSingularity { theta });
    }
    if matches!(point.chart, Chart::BlI | Chart::BlII) && params.delta_factored(c[1]).abs() <= 1e-14 * params.mass * params.mass {
        return Err(KerrError::HorizonSingularity { chart: point.chart, r: c[1] });
    }
    validate_point(params, point)?;
    let s2 = theta.sin().powi(2);
    let out = match point.chart {
        Chart::BlI | Chart::BlII => {
            let r = c[1];
            let rho2 = params.rho2(r, theta);
            MetricTensor { cov: bl_cov(params, r, theta), contra: bl_contra(params, r, theta), det: -rho2 * rho2 * s2 }
        }
        Chart::KerrStar | Chart::StarKerr => {
            let r = c[1];
            let sign = if point.chart == Chart::KerrStar { 1.0 } else { -1.0 };
            let rho2 = params.rho2(r, theta);
            MetricTensor {
                cov: star_cov(params, r, theta, sign),
                contra: star_contra(params, r, theta, sign),
                det: -rho2 * rho2 * s2,
            }
        }
        Chart::ConformalKerrStar | Chart::ConformalStarKerr => {
            let w = c[1];
            let sign = if point.chart == Chart::ConformalKerrStar { 1.0 } else { -1.0 };
            let h = 1.0 + params.spin.powi(2) * w * w * theta.cos().powi(2);
            MetricTensor {
                cov: conformal_cov(params, w, theta, sign),
                contra: conformal_contra(params, w, theta, sign),
                det: -h * h * s2,
            }
        }
        Chart::Kbl => {
            let rf = RadialFunctions::new(params);
            let r = rf.r_from_uv(c[0], c[1])?;
            let cov = kbl_cov(params, &rf, c[0], c[1], r, theta);
            let (contra, det) = invert(&cov)?;
            MetricTensor { cov, contra, det }
        }
    };
    let dev = out.inverse_defect();
    if !(dev <= CONDITIONING_TOL) {
        return Err(KerrError::IllConditioned { deviation: dev });
    }
    Ok(out)
}

/// Pull back `target` through the Jacobian `jac = d(to)/d(from)`.
pub fn pullback(jac: &Mat4, target: &Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            let mut s = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    s += jac[i][a] * target[i][j] * jac[j][b];
                }
            }
            out[a][b] = s;
        }
    }
    out
}
