use std::f64::consts::PI;

use kerrkit::geometry::{horizon_quantities, KerrParams};
use kerrkit::numeric::integrate;
use kerrkit::thermal::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gaussian_line(half_width: f64, n: usize) -> SampledFunction {
    SampledFunction::from_real(Domain::Line { half_width, n }, |u| (-(u - 0.3).powi(2)).exp()).unwrap()
}

#[test]
fn fermi_factors_partition_unity() {
    for beta in [0.5, 2.0 * PI, 8.0 * PI] {
        for i in 0..=2000 {
            let l = -100.0 + 0.1 * i as f64;
            let s = fermi_factor(beta, Sign::Plus, l) + fermi_factor(beta, Sign::Minus, l);
            assert!((s - 1.0).abs() <= 1e-15, "beta={beta} l={l}: {s}");
        }
    }
}

#[test]
fn fermi_factor_decays_on_the_wrong_side() {
    let beta = 2.0;
    assert!(fermi_factor(beta, Sign::Minus, 15.0) < 1e-13);
    assert!(fermi_factor(beta, Sign::Plus, -15.0) < 1e-13);
    assert_eq!(fermi_factor(beta, Sign::Plus, 0.0), 0.5);
}

#[test]
fn beta_is_the_inverse_hawking_temperature() {
    for (m, a) in [(1.0, 0.0), (1.0, 0.3), (2.5, 1.1), (0.7, 0.69)] {
        let h = horizon_quantities(&KerrParams::new(m, a).unwrap()).unwrap();
        let tp = ThermalParams::from_horizon(&h).unwrap();
        assert!((tp.beta - 1.0 / h.t_hawking).abs() <= 1e-14 * tp.beta);
        assert_eq!(tp.beta * tp.kappa, 2.0 * PI);
    }
    let s = horizon_quantities(&KerrParams::new(1.0, 0.0).unwrap()).unwrap();
    assert!((ThermalParams::from_horizon(&s).unwrap().beta - 8.0 * PI).abs() < 1e-12);
}

/// Grid with `ln`-span `32 pi`, so `sigma` steps by `1/16`.
fn gamma_grid(n: usize) -> Domain {
    Domain::HalfLine { x_min: (-16.0 * PI).exp(), x_max: (16.0 * PI).exp(), n }
}

#[test]
fn mellin_of_sqrt_x_exp_matches_quadrature_and_gamma() {
    let f = SampledFunction::from_real(gamma_grid(8192), |x| x.sqrt() * (-x).exp()).unwrap();
    let m = mellin(&f).unwrap();
    let sig = m.points();
    for s in [0.0, 1.0, 2.0] {
        let k = 4096 + (16.0 * s) as usize;
        assert!((sig[k] - s).abs() < 1e-12);
        // (2 pi)^{-1/2} int e^{u - e^u} e^{-i s u} du
        let w = |u: f64| (u - u.exp()).exp();
        let re = integrate(|u| w(u) * (s * u).cos(), -60.0, 5.0, 1e-14).unwrap();
        let im = integrate(|u| -w(u) * (s * u).sin(), -60.0, 5.0, 1e-14).unwrap();
        let direct = Complex64::new(re, im) / (2.0 * PI).sqrt();
        assert!((m.values[k] - direct).norm() < 1e-10, "sigma={s}: {} vs {direct}", m.values[k]);
        // |Gamma(1 + i s)|^2 = pi s / sinh(pi s)
        let gamma_abs = if s == 0.0 { 1.0 } else { (PI * s / (PI * s).sinh()).sqrt() };
        assert!((m.values[k].norm() * (2.0 * PI).sqrt() - gamma_abs).abs() < 1e-10);
    }
}

#[test]
fn mellin_is_unitary_and_inverted() {
    for t in [TestFunction::Bump { lo: 0.5, hi: 7.0 }, TestFunction::LOG_GAUSSIAN] {
        let d = standard_halfline(1 << 14);
        let f = t.sample(d).unwrap();
        let m = mellin(&f).unwrap();
        assert!((m.norm() - f.norm()).abs() < 1e-8 * f.norm());
        let back = mellin_inverse(&m, (-LOG_SPAN).exp()).unwrap();
        assert!(back.sub(&f).unwrap().norm() < 1e-8 * f.norm());
    }
}

#[test]
fn projectors_resolve_the_identity() {
    let f = TestFunction::LOG_GAUSSIAN.sample(standard_halfline(4096)).unwrap();
    let sum = halfline_projector(&f, Sign::Plus).unwrap().add(&halfline_projector(&f, Sign::Minus).unwrap()).unwrap();
    assert!(sum.sub(&f).unwrap().norm() < 1e-10 * f.norm());

    let settings = FourierSettings::default();
    let p = fourier_route(&f, Sign::Plus, &settings).unwrap().projected;
    let m = fourier_route(&f, Sign::Minus, &settings).unwrap().projected;
    let sum = p.add(&m).unwrap();
    let lattice = SampledFunction::new(sum.domain, sum.points().iter().map(|x| f.interpolate(*x)).collect()).unwrap();
    assert!(sum.sub(&lattice).unwrap().norm() < 1e-10 * lattice.norm());
}

#[test]
fn routes_agree_on_the_log_gaussian() {
    let f = TestFunction::LOG_GAUSSIAN.sample(standard_halfline(1 << 14)).unwrap();
    for sign in [Sign::Plus, Sign::Minus] {
        let c = compare_routes(&f, sign, &FourierSettings::default()).unwrap();
        assert!(c.residual < 1e-4, "{sign:?}: {}", c.residual);
        assert!(c.fourier.aliasing_discrepancy < ALIASING_TOL);
    }
}

#[test]
fn route_residual_converges_under_refinement() {
    let tests = [TestFunction::LOG_GAUSSIAN, TestFunction::Gaussian { center: 4.0, width: 1.0 }];
    for t in tests {
        let r: Vec<f64> = (13..=16).map(|k| route_residual(&t, 1 << k).unwrap()).collect();
        for w in r.windows(2) {
            // empirical order log2(r_N / r_2N) of at least one
            assert!(w[1] <= 0.5 * w[0], "{t:?}: {r:?}");
        }
    }
    let bump = TestFunction::Bump { lo: 0.0, hi: 3.0 };
    let r: Vec<f64> = (14..=16).map(|k| route_residual(&bump, 1 << k).unwrap()).collect();
    assert!(r[0] < 1e-4 && r[1] < r[0] && r[2] < r[1], "{r:?}");
}

#[test]
fn coarse_log_grid_is_reported() {
    let bump = TestFunction::Bump { lo: 0.0, hi: 3.0 };
    assert!(matches!(route_residual(&bump, 1 << 12), Err(kerrkit::KerrError::Grid(_))));
}

#[test]
fn lattice_kernel_matches_the_regularised_kernel() {
    for sign in [Sign::Plus, Sign::Minus] {
        let k = kernel_row_check(2048, sign).unwrap();
        assert!(k.compared > 400);
        assert!(k.max_rel_error < 0.05, "{k:?}");
    }
}

fn random_combination(rng: &mut ChaCha8Rng, d: Domain) -> SampledFunction {
    let terms: Vec<(f64, f64, Complex64)> = (0..4)
        .map(|_| {
            (
                rng.random_range(-3.0..3.0),
                rng.random_range(0.4..2.0),
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            )
        })
        .collect();
    SampledFunction::from_fn(d, |x| {
        terms.iter().map(|(c, w, z)| z * (-((x.ln() - c) / w).powi(2)).exp()).sum()
    })
    .unwrap()
}

#[test]
fn quadratic_form_is_nonnegative() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let d = standard_halfline(8192);
    for _ in 0..20 {
        let f = random_combination(&mut rng, d);
        let n2 = f.norm().powi(2);
        for sign in [Sign::Plus, Sign::Minus] {
            let q = f.inner(&halfline_projector(&f, sign).unwrap()).unwrap();
            assert!(q.re >= -1e-8 * n2 && q.im.abs() < 1e-10 * n2, "{q}");
        }
        let lat: Vec<Complex64> = (0..2048).map(|j| f.interpolate(0.01 * j as f64)).collect();
        let pl = lattice_projector(&lat, Sign::Plus, 4).unwrap();
        let q: Complex64 = lat.iter().zip(&pl).map(|(a, b)| a.conj() * b).sum();
        assert!(q.re >= -1e-8 * lat.iter().map(|z| z.norm_sqr()).sum::<f64>());
    }
}

#[test]
fn compressed_projector_is_not_idempotent() {
    // P+ P+ - P+ has Mellin multiplier chi^2 - chi, which is nowhere zero
    let f = TestFunction::LOG_GAUSSIAN.sample(standard_halfline(8192)).unwrap();
    let p1 = halfline_projector(&f, Sign::Plus).unwrap();
    let p2 = halfline_projector(&p1, Sign::Plus).unwrap();
    let defect = p2.sub(&p1).unwrap().norm() / f.norm();
    let mut m = mellin(&f).unwrap();
    for (s, z) in m.points().iter().zip(m.values.iter_mut()) {
        let c = dilation_multiplier(Sign::Plus, *s);
        *z *= c * c - c;
    }
    let expect = m.norm() / f.norm();
    assert!((defect - expect).abs() < 1e-8, "{defect} vs {expect}");
    assert!(defect > 1e-2);
}

#[test]
fn exponential_identity_for_several_surface_gravities() {
    let f = gaussian_line(200.0, 1 << 14);
    for kappa in [1.0, 0.25, 2.0] {
        for sign in [Sign::Plus, Sign::Minus] {
            let r = unruh_identity_residual_with(kappa, &f, sign).unwrap();
            assert!(r < 1e-4, "kappa={kappa} {sign:?}: {r}");
        }
    }
}

#[test]
fn sign_and_temperature_are_not_interchangeable() {
    let f = gaussian_line(200.0, 1 << 14);
    let kappa = 0.25;
    let projected = halfline_projector(&to_exponential(kappa, &f).unwrap(), Sign::Plus).unwrap();
    let pulled = from_exponential(kappa, &projected).unwrap();
    let beta = 2.0 * PI / kappa;
    let mismatch = |b: f64, s: Sign| {
        let d = line_multiplier(&f, |xi| fermi_factor(b, s, xi)).unwrap();
        pulled.sub(&d).unwrap().norm() / f.norm()
    };
    assert!(mismatch(beta, Sign::Minus) < 1e-10);
    assert!(mismatch(beta, Sign::Plus) > 1e-2);
    assert!(mismatch(1.2 * beta, Sign::Minus) > 1e-3);
}

#[test]
fn exponential_identity_through_the_lattice_route() {
    for kappa in [1.0, 0.25, 2.0] {
        let f = unruh_test_function(kappa, 1 << 14).unwrap();
        for sign in [Sign::Plus, Sign::Minus] {
            let r = unruh_lattice_residual(kappa, &f, sign, 1 << 14).unwrap();
            assert!(r < 1e-6, "kappa={kappa} {sign:?}: {r}");
            assert!(unruh_identity_residual_with(kappa, &f, sign).unwrap() < 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fermi_factor_is_a_probability(beta in 1e-3f64..1e3, l in -1e3f64..1e3) {
        let p = fermi_factor(beta, Sign::Plus, l);
        let m = fermi_factor(beta, Sign::Minus, l);
        prop_assert!((0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&m));
        prop_assert!((p + m - 1.0).abs() <= 1e-15);
        prop_assert_eq!(fermi_factor(beta, Sign::Plus, -l), m);
    }

    #[test]
    fn mellin_preserves_norms(c in -2.0f64..2.0, w in 0.3f64..2.0, phase in 0.0f64..6.0) {
        let d = standard_halfline(2048);
        let f = SampledFunction::from_fn(d, |x| Complex64::from_polar((-((x.ln() - c) / w).powi(2)).exp(), phase * x.ln())).unwrap();
        let m = mellin(&f);
        if let Ok(m) = m {
            prop_assert!((m.norm() - f.norm()).abs() < 1e-10 * f.norm());
        }
    }

    #[test]
    fn exponential_change_is_unitary(kappa in 0.05f64..5.0, shift in -3.0f64..3.0) {
        let f = SampledFunction::from_real(Domain::Line { half_width: 20.0, n: 1024 }, |u| (-(u - shift).powi(2)).exp()).unwrap();
        let g = to_exponential(kappa, &f).unwrap();
        prop_assert!((g.norm() - f.norm()).abs() < 1e-10 * f.norm());
    }
}
