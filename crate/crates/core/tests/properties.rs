//! Property tests of the numerical and special-function layers.

use num_complex::Complex64;
use proptest::prelude::*;

use coulomb_coherent::numerics::compensated::neumaier;
use coulomb_coherent::numerics::{integrate_adaptive, sum_series};
use coulomb_coherent::specfun::{gamma_abs, hyp1f1, ln_gamma, ln_gamma_real, nu, pochhammer};
use coulomb_coherent::spectrum::{curved_route_mismatch, gen_factorial_flat, PhysicalConfig, Sector};

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quadrature_is_linear(alpha in -3.0f64..3.0, beta in -3.0f64..3.0, w in 0.1f64..5.0) {
        let f = |x: f64| (w * x).sin();
        let g = |x: f64| (-x * x).exp();
        let lhs = integrate_adaptive(|x: f64| alpha * f(x) + beta * g(x), 0.0, 2.0, 1e-13).unwrap().value;
        let fi = integrate_adaptive(f, 0.0, 2.0, 1e-13).unwrap().value;
        let gi = integrate_adaptive(g, 0.0, 2.0, 1e-13).unwrap().value;
        prop_assert!((lhs - (alpha * fi + beta * gi)).abs() < 1e-11);
    }

    #[test]
    fn quadrature_is_additive(a in -2.0f64..0.0, b in 0.0f64..1.0, c in 1.0f64..3.0) {
        let f = |x: f64| (x * x + 1.0).ln() * x.cos();
        let whole = integrate_adaptive(f, a, c, 1e-13).unwrap().value;
        let parts = integrate_adaptive(f, a, b, 1e-13).unwrap().value + integrate_adaptive(f, b, c, 1e-13).unwrap().value;
        prop_assert!((whole - parts).abs() < 1e-11);
    }

    #[test]
    fn real_gamma_recurrence(x in 0.05f64..60.0) {
        let diff = ln_gamma_real(x + 1.0) - ln_gamma_real(x);
        prop_assert!((diff - x.ln()).abs() <= 1e-12 * ln_gamma_real(x + 1.0).abs().max(1.0));
    }

    #[test]
    fn complex_gamma_recurrence(re in 0.1f64..30.0, im in -30.0f64..30.0) {
        let z = Complex64::new(re, im);
        let lhs = (ln_gamma(z + 1.0).unwrap() - ln_gamma(z).unwrap()).exp();
        prop_assert!((lhs - z).norm() <= 1e-11 * z.norm());
    }

    #[test]
    fn pochhammer_splits(z in 0.1f64..20.0, m in 0usize..15, n in 0usize..15) {
        prop_assert!(close(pochhammer(z, m + n), pochhammer(z, m) * pochhammer(z + m as f64, n), 1e-13));
    }

    #[test]
    fn gamma_abs_matches_complex_log_gamma(ell in 0u32..8, b in -20.0f64..20.0) {
        let direct = ln_gamma(Complex64::new(ell as f64 + 1.0, b)).unwrap().re.exp();
        prop_assert!(close(gamma_abs(ell, b), direct, 1e-12));
    }

    #[test]
    fn nu_is_increasing(x in 0.0f64..20.0, dx in 0.01f64..5.0) {
        prop_assert!(nu(x + dx).unwrap() > nu(x).unwrap());
    }

    #[test]
    fn finite_support_series_is_exact(terms in proptest::collection::vec(-1e3f64..1e3, 1..40)) {
        let k = terms.len();
        let r = sum_series(|n| Complex64::new(if n < k { terms[n] } else { 0.0 }, 0.0), 1e-16, 1000).unwrap();
        prop_assert_eq!(r.value.re, neumaier(terms.iter().copied()));
    }

    #[test]
    fn kummer_transformation(n in 0u32..12, b in 1.0f64..8.0, z in 0.0f64..4.0) {
        let a = Complex64::new(-(n as f64), 0.0);
        let lhs = hyp1f1(a, b, Complex64::new(z, 0.0)).unwrap();
        let rhs = hyp1f1(Complex64::new(b + n as f64, 0.0), b, Complex64::new(-z, 0.0)).unwrap() * z.exp();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm().max(1.0));
    }

    #[test]
    fn curved_number_routes_agree(n in 0u32..40, ell in 0u32..4, radius in 2.0f64..500.0) {
        let cfg = PhysicalConfig::curved(0.5, radius).unwrap();
        prop_assert!(curved_route_mismatch(n, Sector::new(ell), &cfg).unwrap() < 1e-12);
    }

    #[test]
    fn flat_factorials_are_bounded(n in 0u32..100, ell in 0u32..6) {
        let f = gen_factorial_flat(n, Sector::new(ell));
        prop_assert!(f > 0.0 && f <= 1.0);
    }
}
