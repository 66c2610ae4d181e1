use std::f64::consts::PI;

use subord_core::fixtures::{pinned_gw_constants, FIXTURE_TOLERANCE, GW_PAIRS};
use subord_core::testkit::TestFunctionSpec;
use subord_core::*;

fn grid() -> GridSpec {
    GridSpec::new(40.0, 16384).unwrap()
}

#[test]
fn constants_match_pinned_values_and_verify() {
    let g = grid();
    let tests = materialize_all(&default_suite(Purpose::Means), &g).unwrap();
    let ps = [Exponent::ONE, Exponent::TWO, Exponent::INFINITY];
    let pinned = pinned_gw_constants();
    for (alpha, beta) in GW_PAIRS {
        let est = gw_constant(alpha, beta, &g).unwrap();
        assert!(est.converged, "({alpha},{beta})");
        let want = pinned.get(alpha, beta).unwrap();
        assert!((est.total - want).abs() <= FIXTURE_TOLERANCE, "({alpha},{beta}): {} vs {want}", est.total);
        let report = gw_verify(alpha, beta, &tests, &[1.0, 0.5, 0.1], &ps, &g).unwrap();
        assert_eq!(report.per_case.len(), 54);
        assert!(report.passed, "({alpha},{beta}): worst {}", report.worst_ratio);
        assert!(report.worst_ratio <= est.total * 1.01);
    }
}

#[test]
fn error_decreases_with_epsilon() {
    let g = grid();
    let f = materialize(&TestFunctionSpec::gaussian(1.0), &g).unwrap();
    for alpha in [1.0, 2.0] {
        let errs: Vec<f64> = [1.0, 0.5, 0.1, 0.05]
            .iter()
            .map(|&eps| gw_error(&f, alpha, eps, Exponent::TWO).unwrap().error)
            .collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "alpha={alpha}: {errs:?}");
    }
}

#[test]
fn gauss_weierstrass_mean_of_gaussian() {
    // φ₂(εy) f̂(y) for f = e^{-x²} is √π e^{-(1+4ε²)y²/4}, whose inverse is
    // e^{-x²/(1+4ε²)}/√(1+4ε²).
    let g = grid();
    let f = materialize(&TestFunctionSpec::gaussian(1.0), &g).unwrap();
    for eps in [1.0, 0.5, 0.1] {
        let m = gw_mean(&f, 2.0, eps).unwrap();
        let s = 1.0 + 4.0 * eps * eps;
        for (j, v) in m.values().iter().enumerate() {
            let x = g.node(j);
            assert!((v.re - (-x * x / s).exp() / s.sqrt()).abs() <= 1e-12);
        }
        let space = summability::gw_mean_space(&f, 2.0, eps).unwrap();
        assert!(space.sub(&m).unwrap().max_abs() <= 1e-8);
    }
}

#[test]
fn kernel_mass_and_peak() {
    let g = grid();
    for alpha in [0.5, 1.0, 2.0, 4.0] {
        let k = gw_kernel(alpha, &g).unwrap();
        let mass: f64 = k.values().iter().map(|v| v.re).sum::<f64>() * g.spacing();
        assert!((mass - 1.0).abs() <= 1e-3, "alpha={alpha}: {mass}");
    }
    // α = 2: e^{-x²/4}/(2√π).
    let k = gw_kernel(2.0, &g).unwrap();
    let j = g.size() / 2;
    assert!((k.values()[j].re - 1.0 / (2.0 * PI.sqrt())).abs() < 1e-12);
}

#[test]
fn invalid_parameters() {
    let g = grid();
    assert!(gw_constant(2.0, 1.0, &g).is_err());
    assert!(gw_constant(0.0, 1.0, &g).is_err());
    let f = materialize(&TestFunctionSpec::gaussian(1.0), &g).unwrap();
    assert!(matches!(gw_error(&f, 1.0, 1e-4, Exponent::TWO), Err(Error::KernelUnresolvable { .. })));
}
