use crate::error::{KerrError, Result};
use crate::geometry::{KerrParams, RadialFunctions};
use crate::numeric::{bisect, integrate};

const QUAD_TOL: f64 = 1e-13;
/// Outer edge of the branch on which `x~` follows `y`.
pub const X_TILDE_EDGE: f64 = 3.0;

/// Radial profiles for `M = 1`. Radii, `T` and `n` are in units of `M`.
#[derive(Debug, Clone)]
pub struct RadialProfiles {
    pub a: f64,
    pub rp: f64,
    pub rm: f64,
    rf: RadialFunctions,
    y_edge: f64,
    /// mollifier plateau width
    pub eps: f64,
    /// `(r+ + r-)/2`, where the mollifier reaches zero
    pub mid: f64,
    i_trans: f64,
}

pub fn radial_profiles(params: &KerrParams) -> Result<RadialProfiles> {
    RadialProfiles::new(params)
}

impl RadialProfiles {
    pub fn new(params: &KerrParams) -> Result<Self> {
        params.validate()?;
        let p = params.normalized();
        let rf = RadialFunctions::new(&p);
        let (rp, rm) = (p.r_plus(), p.r_minus());
        let eps = 0.1 * (rp - rm);
        let mid = 0.5 * (rp + rm);
        let mut out = RadialProfiles { a: p.spin, rp, rm, rf, y_edge: 0.0, eps, mid, i_trans: 0.0 };
        out.y_edge = out.y(X_TILDE_EDGE)?;
        let inner = rm + eps;
        out.i_trans = integrate(|s| out.chi(s) / (s - rm), inner, mid, QUAD_TOL)?;
        Ok(out)
    }

    fn delta(&self, r: f64) -> f64 {
        (r - self.rp) * (r - self.rm)
    }

    fn outside(&self, r: f64) -> Result<()> {
        if r > self.rp && r.is_finite() {
            Ok(())
        } else {
            Err(KerrError::InvalidArgument(format!("radius {r} not in (r+, inf) with r+ = {}", self.rp)))
        }
    }

    /// `f = (r^2+a^2)^2/Delta^2 - (a^2+1)/Delta`.
    pub fn f(&self, r: f64) -> f64 {
        let d = self.delta(r);
        let s = r * r + self.a * self.a;
        s * s / (d * d) - (self.a * self.a + 1.0) / d
    }

    /// `sqrt(f)`, computed as `sqrt(Delta^2 f)/Delta`.
    pub fn dy(&self, r: f64) -> f64 {
        self.delta_sqrt_f(r) / self.delta(r)
    }

    fn delta_sqrt_f(&self, r: f64) -> f64 {
        let s = r * r + self.a * self.a;
        (s * s - (self.a * self.a + 1.0) * self.delta(r)).sqrt()
    }

    /// `sqrt(f) - (r^2+a^2)/Delta` in rationalised form, bounded at `r+`.
    fn y_defect(&self, r: f64) -> f64 {
        -(self.a * self.a + 1.0) / (self.delta_sqrt_f(r) + r * r + self.a * self.a)
    }

    pub fn x(&self, r: f64) -> f64 {
        self.rf.x(r)
    }

    /// `y = x + int_{r+}^r (sqrt f - (s^2+a^2)/Delta) ds`, so `y' = sqrt f`
    /// and `y - x -> 0` at `r+`.
    pub fn y(&self, r: f64) -> Result<f64> {
        self.outside(r)?;
        Ok(self.x(r) + integrate(|s| self.y_defect(s), self.rp, r, QUAD_TOL)?)
    }

    /// `y` up to `r = 3`, constant beyond.
    pub fn x_tilde(&self, r: f64) -> Result<f64> {
        if r > X_TILDE_EDGE {
            self.outside(r)?;
            Ok(self.y_edge)
        } else {
            self.y(r)
        }
    }

    pub fn dx_tilde(&self, r: f64) -> f64 {
        if r > X_TILDE_EDGE {
            0.0
        } else {
            self.dy(r)
        }
    }

    /// `max(-n, x~)`.
    pub fn x_tilde_n(&self, r: f64, n: f64) -> Result<f64> {
        Ok(self.x_tilde(r)?.max(-n))
    }

    pub fn dx_tilde_n(&self, r: f64, n: f64) -> Result<f64> {
        Ok(if self.x_tilde(r)? > -n { self.dx_tilde(r) } else { 0.0 })
    }

    /// Radii where `x~_n` is not smooth.
    pub fn x_tilde_n_kinks(&self, n: f64) -> Result<Vec<f64>> {
        let mut kinks = vec![X_TILDE_EDGE];
        if self.y_edge > -n {
            // y -> -inf at r+; solve in w = ln(r - r+)
            let g = |w: f64| self.y(self.rp + w.exp()).map(|y| y + n).unwrap_or(f64::NAN);
            let w = bisect(g, -700.0, (X_TILDE_EDGE - self.rp).ln(), 1e-15)?;
            kinks.push(self.rp + w.exp());
        }
        Ok(kinks)
    }

    /// `min(r - 2 ln r, n)`.
    pub fn x_n(&self, r: f64, n: f64) -> f64 {
        (r - 2.0 * r.ln()).min(n)
    }

    pub fn dx_n(&self, r: f64, n: f64) -> f64 {
        if r - 2.0 * r.ln() < n {
            1.0 - 2.0 / r
        } else {
            0.0
        }
    }

    /// Roots of `r - 2 ln r = n` in `(r+, inf)`. The left side has its
    /// minimum at `r = 2`.
    pub fn x_n_kinks(&self, n: f64) -> Result<Vec<f64>> {
        let h = |r: f64| r - 2.0 * r.ln() - n;
        let mut out = Vec::new();
        if h(2.0) >= 0.0 {
            return Ok(out);
        }
        if self.rp < 2.0 && h(self.rp) > 0.0 {
            out.push(bisect(h, self.rp, 2.0, 1e-15)?);
        }
        let mut hi = 4.0;
        while h(hi) < 0.0 {
            hi *= 2.0;
        }
        out.push(bisect(h, 2.0, hi, 1e-15)?);
        Ok(out)
    }

    /// Mollifier: 1 up to `r- + eps`, 0 from `mid` on, quintic smoothstep
    /// in between.
    pub fn chi(&self, r: f64) -> f64 {
        let lo = self.rm + self.eps;
        let s = ((r - lo) / (self.mid - lo)).clamp(0.0, 1.0);
        1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
    }

    /// `v' = 1 + chi/(r - r-)`.
    pub fn dv(&self, r: f64) -> f64 {
        if r >= self.mid {
            1.0
        } else {
            1.0 + self.chi(r) / (r - self.rm)
        }
    }

    /// `v` with `v(r+) = r+`; equals `r` on `[mid, inf)` and tends to
    /// `-inf` at `r-`.
    pub fn v(&self, r: f64) -> Result<f64> {
        if !(r > self.rm) {
            return Err(KerrError::InvalidArgument(format!("v needs r > r- = {}, got {r}", self.rm)));
        }
        let inner = self.rm + self.eps;
        if r >= self.mid {
            Ok(r)
        } else if r >= inner {
            Ok(r - integrate(|s| self.chi(s) / (s - self.rm), r, self.mid, QUAD_TOL)?)
        } else {
            Ok(r - self.i_trans - (self.eps / (r - self.rm)).ln())
        }
    }

    /// `r_T - r+`, where `r_T` solves `x(r) - r = -T` on `(r+, 2 r+)`.
    pub fn r_t_offset(&self, t_level: f64) -> Result<f64> {
        let g = |w: f64| {
            let r = self.rp + w.exp();
            self.x(r) - r + t_level
        };
        let hi = self.rp.ln();
        if !(g(hi) > 0.0) {
            return Err(KerrError::Bracket(format!("x(r) - r = -{t_level} has no root below 2 r+; T too small")));
        }
        let w = bisect(g, -700.0, hi, 1e-15)?;
        Ok(w.exp())
    }

    pub fn r_t(&self, t_level: f64) -> Result<f64> {
        Ok(self.rp + self.r_t_offset(t_level)?)
    }
}
