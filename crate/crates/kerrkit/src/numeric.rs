//! Small scalar numerics shared by the modules: bracketed root finding,
//! real polynomial roots, a Dormand–Prince step, adaptive quadrature and
//! golden-section minimisation.

use crate::error::{KerrError, Result};

/// Safeguarded Newton iteration on a bracket `[lo, hi]` with `f(lo)` and
/// `f(hi)` of opposite sign. Falls back to bisection whenever the Newton step
/// leaves the bracket or fails to halve the residual.
pub fn newton_bisect<F>(f: F, mut lo: f64, mut hi: f64, xtol: f64, max_iter: usize) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    let (mut flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(KerrError::Bracket(format!(
            "f({lo})={flo:e} and f({hi})={fhi:e} have the same sign"
        )));
    }
    let mut x = 0.5 * (lo + hi);
    let mut last_res = f64::INFINITY;
    for _ in 0..max_iter {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let next = if dfx.is_finite()
            && dfx != 0.0
            && newton > lo
            && newton < hi
            && fx.abs() < 0.5 * last_res
        {
            newton
        } else {
            0.5 * (lo + hi)
        };
        last_res = fx.abs();
        if (next - x).abs() <= xtol * (1.0 + x.abs()) || (hi - lo) <= xtol * (1.0 + x.abs()) {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

/// Plain bisection for a sign change on `[lo, hi]`.
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(KerrError::Bracket(format!(
            "f({lo})={flo:e} and f({hi})={fhi:e} have the same sign"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= xtol * (1.0 + mid.abs()) {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

const GK_X: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const GK_WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = GK_WK[7] * fc;
    let mut g = GK_WG[3] * fc;
    for i in 0..7 {
        let dx = h * GK_X[i];
        let s = f(c - dx) + f(c + dx);
        k += GK_WK[i] * s;
        if i % 2 == 1 {
            g += GK_WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) quadrature with absolute-or-relative target.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut stack = vec![(a, b, 0usize)];
    let mut total = 0.0;
    let mut evals = 0usize;
    while let Some((lo, hi, depth)) = stack.pop() {
        let (val, err) = gk15(&f, lo, hi);
        evals += 1;
        if !val.is_finite() {
            return Err(KerrError::Quadrature { lo, hi });
        }
        let local_tol = tol * ((hi - lo) / (b - a)).abs().max(1e-3);
        if err <= local_tol.max(1e-15 * val.abs()) || depth > 50 {
            if depth > 50 && err > 1e3 * local_tol {
                return Err(KerrError::Quadrature { lo, hi });
            }
            total += val;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, depth + 1));
            stack.push((mid, hi, depth + 1));
        }
        if evals > 200_000 {
            return Err(KerrError::Quadrature { lo: a, hi: b });
        }
    }
    Ok(total)
}

/// Golden-section minimisation of a unimodal function on `[a, b]`.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, xtol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > xtol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Horner evaluation with ascending coefficients `c[0] + c[1] x + ...`.
pub fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

/// Sum of `|c_i x^i|`, the natural rounding scale of [`poly_eval`].
pub fn poly_scale(c: &[f64], x: f64) -> f64 {
    let ax = x.abs();
    c.iter().rev().fold(0.0, |acc, &ci| acc * ax + ci.abs())
}

pub fn poly_deriv(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(i, &ci)| i as f64 * ci).collect()
}

fn poly_trim(c: &[f64]) -> &[f64] {
    let mut n = c.len();
    while n > 0 && c[n - 1] == 0.0 {
        n -= 1;
    }
    &c[..n]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyRoot {
    pub x: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealRoots {
    pub roots: Vec<PolyRoot>,
    /// Some critical value sat within three decades above the tolerance.
    pub near_degenerate: bool,
    /// Degree after dropping vanishing leading coefficients; `None` for the
    /// zero polynomial.
    pub degree: Option<usize>,
}

/// Real roots with multiplicity of a real polynomial.
///
/// Critical points are found recursively from the derivative. A critical
/// point `c` with `|p(c)| <= tol * poly_scale(p, c)` is a root of multiplicity
/// one more than its multiplicity in `p'`. Simple roots are bracketed between
/// consecutive critical points, where `p` is monotone.
pub fn real_roots(c: &[f64], tol: f64) -> RealRoots {
    let c = poly_trim(c);
    if c.is_empty() {
        return RealRoots { roots: vec![], near_degenerate: false, degree: None };
    }
    let deg = c.len() - 1;
    if deg == 0 {
        return RealRoots { roots: vec![], near_degenerate: false, degree: Some(0) };
    }
    if deg == 1 {
        return RealRoots { roots: vec![PolyRoot { x: -c[0] / c[1], multiplicity: 1 }], near_degenerate: false, degree: Some(1) };
    }
    let d = poly_deriv(c);
    let crit = real_roots(&d, tol);
    let mut near_degenerate = crit.near_degenerate;
    let lead = c[deg];
    let bound = 1.0 + c[..deg].iter().map(|ci| (ci / lead).abs()).fold(0.0, f64::max);

    let mut points: Vec<(f64, bool)> = Vec::new();
    let mut roots = Vec::new();
    for cr in &crit.roots {
        let val = poly_eval(c, cr.x);
        let rel = val.abs() / poly_scale(c, cr.x).max(f64::MIN_POSITIVE);
        let is_root = rel <= tol;
        if !is_root && rel <= 1e3 * tol {
            near_degenerate = true;
        }
        if is_root {
            roots.push(PolyRoot { x: cr.x, multiplicity: cr.multiplicity + 1 });
        }
        points.push((cr.x, is_root));
    }
    let mut grid = vec![(-bound, false)];
    grid.extend(points.iter().copied());
    grid.push((bound, false));
    for w in grid.windows(2) {
        let ((lo, lo_root), (hi, hi_root)) = (w[0], w[1]);
        if lo_root || hi_root || hi <= lo {
            continue;
        }
        let (flo, fhi) = (poly_eval(c, lo), poly_eval(c, hi));
        if flo == 0.0 || fhi == 0.0 || flo.signum() == fhi.signum() {
            continue;
        }
        let f = |x: f64| (poly_eval(c, x), poly_eval(&d, x));
        if let Ok(x) = newton_bisect(f, lo, hi, 1e-16, 300) {
            roots.push(PolyRoot { x, multiplicity: 1 });
        }
    }
    roots.sort_by(|a, b| a.x.total_cmp(&b.x));
    RealRoots { roots, near_degenerate, degree: Some(deg) }
}

/// One Dormand–Prince 5(4) step. Returns the fifth-order solution and the
/// embedded error estimate, or `None` when the right-hand side refuses a stage.
pub fn dopri5_step<const N: usize, F>(f: &F, y: &[f64; N], k1: &[f64; N], h: f64) -> Option<([f64; N], [f64; N], [f64; N])>
where
    F: Fn(&[f64; N]) -> Option<[f64; N]>,
{
    const A21: f64 = 1.0 / 5.0;
    const A31: f64 = 3.0 / 40.0;
    const A32: f64 = 9.0 / 40.0;
    const A41: f64 = 44.0 / 45.0;
    const A42: f64 = -56.0 / 15.0;
    const A43: f64 = 32.0 / 9.0;
    const A51: f64 = 19372.0 / 6561.0;
    const A52: f64 = -25360.0 / 2187.0;
    const A53: f64 = 64448.0 / 6561.0;
    const A54: f64 = -212.0 / 729.0;
    const A61: f64 = 9017.0 / 3168.0;
    const A62: f64 = -355.0 / 33.0;
    const A63: f64 = 46732.0 / 5247.0;
    const A64: f64 = 49.0 / 176.0;
    const A65: f64 = -5103.0 / 18656.0;
    const B1: f64 = 35.0 / 384.0;
    const B3: f64 = 500.0 / 1113.0;
    const B4: f64 = 125.0 / 192.0;
    const B5: f64 = -2187.0 / 6784.0;
    const B6: f64 = 11.0 / 84.0;
    const E1: f64 = 71.0 / 57600.0;
    const E3: f64 = -71.0 / 16695.0;
    const E4: f64 = 71.0 / 1920.0;
    const E5: f64 = -17253.0 / 339200.0;
    const E6: f64 = 22.0 / 525.0;
    const E7: f64 = -1.0 / 40.0;

    let comb = |coef: &[(f64, &[f64; N])]| {
        let mut out = *y;
        for i in 0..N {
            for (c, k) in coef {
                out[i] += h * c * k[i];
            }
        }
        out
    };
    let k2 = f(&comb(&[(A21, k1)]))?;
    let k3 = f(&comb(&[(A31, k1), (A32, &k2)]))?;
    let k4 = f(&comb(&[(A41, k1), (A42, &k2), (A43, &k3)]))?;
    let k5 = f(&comb(&[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
    let k6 = f(&comb(&[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]))?;
    let y5 = comb(&[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let k7 = f(&y5)?;
    let mut err = [0.0; N];
    for i in 0..N {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    Some((y5, err, k7))
}
