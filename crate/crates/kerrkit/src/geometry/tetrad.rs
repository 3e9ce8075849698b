use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

use super::chart::{validate_point, Chart, RadialFunctions, SpacetimePoint};
use super::metric::{metric, MetricTensor, AXIS_GUARD};
use super::params::KerrParams;
use crate::error::{KerrError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TetradKind {
    Basic,
    FoliationAdapted,
    #[serde(rename = "KBL")]
    Kbl,
    Conformal,
}

impl TetradKind {
    pub const ALL: [TetradKind; 4] =
        [TetradKind::Basic, TetradKind::FoliationAdapted, TetradKind::Kbl, TetradKind::Conformal];

    /// Chart in which the tetrad is expressed.
    pub fn chart(&self) -> Chart {
        match self {
            TetradKind::Basic | TetradKind::FoliationAdapted => Chart::BlI,
            TetradKind::Kbl => Chart::Kbl,
            TetradKind::Conformal => Chart::ConformalKerrStar,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            TetradKind::Basic => "Basic",
            TetradKind::FoliationAdapted => "FoliationAdapted",
            TetradKind::Kbl => "KBL",
            TetradKind::Conformal => "Conformal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullTetrad {
    pub kind: TetradKind,
    pub l: [f64; 4],
    pub n: [f64; 4],
    pub m: [Complex64; 4],
}

/// Residuals of the six null-tetrad relations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TetradResiduals {
    pub ll: f64,
    pub nn: f64,
    pub ln_plus_one: f64,
    pub mm: f64,
    pub mmbar_minus_one: f64,
    pub lm_nm: f64,
}

impl TetradResiduals {
    pub fn max(&self) -> f64 {
        [self.ll, self.nn, self.ln_plus_one, self.mm, self.mmbar_minus_one, self.lm_nm]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

fn cdot(g: &MetricTensor, u: &[Complex64; 4], v: &[Complex64; 4]) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            s += u[i] * g.cov[i][j] * v[j];
        }
    }
    s
}

fn real(v: &[f64; 4]) -> [Complex64; 4] {
    v.map(|x| Complex64::new(x, 0.0))
}

impl NullTetrad {
    pub fn m_bar(&self) -> [Complex64; 4] {
        self.m.map(|z| z.conj())
    }

    pub fn residuals(&self, g: &MetricTensor) -> TetradResiduals {
        let lc = real(&self.l);
        let nc = real(&self.n);
        TetradResiduals {
            ll: g.norm(&self.l).abs(),
            nn: g.norm(&self.n).abs(),
            ln_plus_one: (g.dot(&self.l, &self.n) + 1.0).abs(),
            mm: cdot(g, &self.m, &self.m).norm(),
            mmbar_minus_one: (cdot(g, &self.m, &self.m_bar()) - 1.0).norm(),
            lm_nm: cdot(g, &lc, &self.m).norm().max(cdot(g, &nc, &self.m).norm()),
        }
    }

    /// `u0 = (l+n)/sqrt2, u1 = (l-n)/sqrt2, u2 = sqrt2 Re m, u3 = sqrt2 Im m`.
    pub fn orthonormal_frame(&self) -> [[f64; 4]; 4] {
        let mut u = [[0.0; 4]; 4];
        for i in 0..4 {
            u[0][i] = (self.l[i] + self.n[i]) / SQRT_2;
            u[1][i] = (self.l[i] - self.n[i]) / SQRT_2;
            u[2][i] = SQRT_2 * self.m[i].re;
            u[3][i] = SQRT_2 * self.m[i].im;
        }
        u
    }
}

/// Null tetrad of the requested kind at `point`.
pub fn null_tetrad(params: &KerrParams, point: &SpacetimePoint, kind: TetradKind) -> Result<NullTetrad> {
    params.validate()?;
    if point.chart != kind.chart() {
        return Err(KerrError::ChartMismatch { kind: kind.name(), expected: kind.chart(), got: point.chart });
    }
    validate_point(params, point)?;
    let (m, a) = (params.mass, params.spin);
    let theta = point.coords[2];
    let (st, ct) = theta.sin_cos();
    if st.abs() <= AXIS_GUARD {
        return Err(KerrError::AxisSingularity { theta });
    }
    let i = Complex64::i();
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    match kind {
        TetradKind::Basic | TetradKind::FoliationAdapted => {
            let r = point.coords[1];
            let d = params.delta(r);
            if d <= 0.0 {
                return Err(KerrError::HorizonSingularity { chart: point.chart, r });
            }
            let rho2 = params.rho2(r, theta);
            if kind == TetradKind::Basic {
                let s = 1.0 / (2.0 * d * rho2).sqrt();
                let ra = r * r + a * a;
                let pc = Complex64::new(r, a * ct);
                let f = one / (SQRT_2 * pc);
                Ok(NullTetrad {
                    kind,
                    l: [s * ra, s * d, 0.0, s * a],
                    n: [s * ra, -s * d, 0.0, s * a],
                    m: [f * i * a * st, zero, f, f * i / st],
                })
            } else {
                let sigma = params.sigma2(r, theta).sqrt();
                let s = sigma / (2.0 * d * rho2).sqrt();
                let w = 2.0 * a * m * r / (sigma * sigma);
                let rr = (d / (2.0 * rho2)).sqrt();
                let f = 1.0 / (2.0 * rho2).sqrt();
                Ok(NullTetrad {
                    kind,
                    l: [s, rr, 0.0, s * w],
                    n: [s, -rr, 0.0, s * w],
                    m: [zero, zero, Complex64::new(f, 0.0), i * f * rho2 / (sigma * st)],
                })
            }
        }
        TetradKind::Kbl => {
            let rf = RadialFunctions::new(params);
            let [u, v, _, _] = point.coords;
            let r = rf.r_from_uv(u, v)?;
            let (rp, rm, k) = (rf.rp, rf.rm, rf.kappa);
            let rho2 = params.rho2(r, theta);
            let ra = r * r + a * a;
            let pre = (-k * r).exp() * (r - rm).powf(m / rp) / ((r - rm) * (2.0 * rho2).sqrt());
            let big = 2.0 * k * ra / rf.g(r);
            let rot = a * (r + rp) / (rp * rp + a * a);
            let pc = Complex64::new(r, a * ct);
            let f = one / (SQRT_2 * pc);
            // d_t = kappa(-U d_U + V d_V) - Omega_H d_phi#
            let dt = [-k * u, k * v, 0.0, -rf.omega_h];
            let mvec = [
                f * i * a * st * dt[0],
                f * i * a * st * dt[1],
                f,
                f * (i * a * st * dt[3] + i / st),
            ];
            Ok(NullTetrad {
                kind,
                l: [0.0, pre * big, 0.0, -pre * rot * u],
                n: [-pre * big, 0.0, 0.0, -pre * rot * v],
                m: mvec,
            })
        }
        TetradKind::Conformal => {
            let w = point.coords[1];
            let h = 1.0 + a * a * w * w * ct * ct;
            let fw = 1.0 - 2.0 * m * w + a * a * w * w;
            let s = 1.0 / (2.0 * fw * h).sqrt();
            let pc = Complex64::new(1.0, a * w * ct);
            let f = one / (SQRT_2 * pc);
            Ok(NullTetrad {
                kind,
                l: [2.0 * s * (1.0 + a * a * w * w), -s * w * w * fw, 0.0, 2.0 * s * a * w * w],
                n: [0.0, (fw / (2.0 * h)).sqrt(), 0.0, 0.0],
                m: [f * i * a * st, zero, f, f * i / st],
            })
        }
    }
}

/// Tetrad together with the metric it is normalised against.
pub fn null_tetrad_with_metric(
    params: &KerrParams,
    point: &SpacetimePoint,
    kind: TetradKind,
) -> Result<(NullTetrad, MetricTensor)> {
    let t = null_tetrad(params, point, kind)?;
    let g = metric(params, point)?;
    Ok((t, g))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_tetrad_relations() {
        let p = KerrParams::new(1.0, 0.4).unwrap();
        let pt = SpacetimePoint::new(Chart::BlI, [0.0, 3.3, 1.2, 0.0]);
        let (t, g) = null_tetrad_with_metric(&p, &pt, TetradKind::Basic).unwrap();
        assert!(t.residuals(&g).max() < 1e-12);
    }

    #[test]
    fn conformal_l_at_scri() {
        let p = KerrParams::new(1.0, 0.4).unwrap();
        let pt = SpacetimePoint::new(Chart::ConformalKerrStar, [0.0, 1e-6, 1.2, 0.0]);
        let t = null_tetrad(&p, &pt, TetradKind::Conformal).unwrap();
        let target = [SQRT_2, 0.0, 0.0, 0.0];
        let err = (0..4).map(|i| (t.l[i] - target[i]).abs()).fold(0.0, f64::max);
        assert!(err < 1e-4);
    }

    #[test]
    fn kind_chart_mismatch() {
        let p = KerrParams::new(1.0, 0.4).unwrap();
        let pt = SpacetimePoint::new(Chart::KerrStar, [0.0, 3.3, 1.2, 0.0]);
        assert!(matches!(null_tetrad(&p, &pt, TetradKind::Basic), Err(KerrError::ChartMismatch { .. })));
    }

    #[test]
    fn orthonormal_frame_is_minkowskian() {
        let p = KerrParams::new(1.0, 0.4).unwrap();
        let pt = SpacetimePoint::new(Chart::BlI, [0.0, 3.3, 1.2, 0.0]);
        let (t, g) = null_tetrad_with_metric(&p, &pt, TetradKind::FoliationAdapted).unwrap();
        let u = t.orthonormal_frame();
        for i in 0..4 {
            for j in 0..4 {
                let eta = if i != j { 0.0 } else if i == 0 { -1.0 } else { 1.0 };
                assert!((g.dot(&u[i], &u[j]) - eta).abs() < 1e-12);
            }
        }
    }
}
