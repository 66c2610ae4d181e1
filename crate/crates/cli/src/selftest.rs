//! A fixed battery of oracle checks, run on the configured grid.

use std::f64::consts::PI;

use serde_json::{json, Value};
use subord_core::diffops::{verify_identity_suite, DiffopExponents};
use subord_core::fixtures::{GwFixtureFile, FIXTURE_TOLERANCE, GW_PAIRS};
use subord_core::testkit::TestFunctionSpec;
use subord_core::{
    carlson_sufficient_bound, default_suite, diffop_subordination, forward_ft, gw_constant, gw_error, gw_verify,
    inverse_ft, lemma2_construct, lemma2_hypotheses, materialize, materialize_all, ratio_multiplier, verify_subordination,
    wiener_norm_estimate, ComparisonSetup, Error, Exponent, GridSpec, Multiplier, Polynomial, Purpose, Registry,
};

use crate::run::{error_value, rows_of, CsvRow};

type Check = Result<(bool, Value), Error>;

struct Battery {
    checks: Vec<Value>,
    rows: Vec<CsvRow>,
    passed: bool,
}

impl Battery {
    fn record(&mut self, name: &str, outcome: Check) {
        let (passed, details) = match outcome {
            Ok(v) => v,
            Err(e) => (false, json!({ "error": error_value(&e) })),
        };
        self.passed &= passed;
        self.checks.push(json!({ "name": name, "passed": passed, "details": details }));
    }
}

fn poly(c: &[f64]) -> Polynomial {
    Polynomial::from_real(c)
}

fn triples() -> Vec<(Polynomial, Polynomial, Polynomial)> {
    vec![
        (poly(&[0.0, 1.0]), poly(&[0.0, 0.0, 1.0]), poly(&[1.0])),
        (poly(&[1.0, 0.0, 1.0]), poly(&[1.0, 0.0, 1.0]), poly(&[1.0])),
        (poly(&[0.0, 1.0]), poly(&[0.0, 0.0, 0.0, 1.0]), poly(&[0.0, 1.0])),
        (poly(&[-1.0, 0.0, 1.0]), poly(&[1.0, 0.0, -2.0, 0.0, 1.0]), poly(&[-1.0, 0.0, 1.0])),
    ]
}

fn transform_oracle() -> Check {
    let g = GridSpec::new(20.0, 4096)?;
    let f = materialize(&TestFunctionSpec::gaussian(1.0), &g)?;
    let fh = forward_ft(&f)?;
    let mut worst: f64 = 0.0;
    for (k, v) in fh.values().iter().enumerate() {
        let y = g.dual_node(k);
        if y.abs() <= 10.0 {
            let exact = PI.sqrt() * (-y * y / 4.0).exp();
            worst = worst.max((v - exact).norm() / exact);
        }
    }
    let round_trip = inverse_ft(&fh)?.sub(&f)?.max_abs();
    Ok((worst <= 1e-6 && round_trip <= 1e-10, json!({ "max_relative_error": worst, "round_trip_error": round_trip })))
}

fn wiener_calibration(g: &GridSpec) -> Check {
    let exp_abs: Multiplier = Registry::ExpAbs { rate: 1.0 }.into();
    let one = Multiplier::constant(1.0);
    let a = wiener_norm_estimate(&exp_abs, g)?;
    let b = wiener_norm_estimate(&one, g)?;
    let ca = carlson_sufficient_bound(&exp_abs, g)?;
    let cb = carlson_sufficient_bound(&one, g)?;
    let passed = a.converged && (a.total - 1.0).abs() <= 1e-3 && b.total == 1.0 && ca >= a.total && cb >= b.total;
    Ok((passed, json!({ "exp_abs": a.total, "constant": b.total, "carlson_exp_abs": ca, "carlson_constant": cb })))
}

fn reflexivity(g: &GridSpec) -> Check {
    let m: Multiplier = Registry::Lorentzian { rate: 1.0 }.into();
    let tests = materialize_all(&default_suite(Purpose::Means), g)?;
    let ps = [Exponent::ONE, Exponent::TWO, Exponent::INFINITY];
    let report = verify_subordination(&ComparisonSetup::new(m.clone(), m), &tests, &ps, g)?;
    let swapped = ComparisonSetup::new(
        Registry::Lorentzian { rate: 1.0 }.into(),
        Registry::GwComplement { alpha: 1.0 }.into(),
    );
    let rejected = matches!(ratio_multiplier(&swapped, g), Err(Error::NestedZerosViolated { .. }));
    let passed = (report.constant - 1.0).abs() <= 1e-6 && report.worst_ratio <= 1.0 + 1e-6 && rejected;
    Ok((passed, json!({ "K_est": report.constant, "worst_ratio": report.worst_ratio, "swapped_rejected": rejected })))
}

fn gw_pair(b: &mut Battery, alpha: f64, beta: f64, g: &GridSpec, fixtures: &GwFixtureFile) {
    let outcome = (|| {
        let est = gw_constant(alpha, beta, g)?;
        let tests = materialize_all(&default_suite(Purpose::Means), g)?;
        let ps = [Exponent::ONE, Exponent::TWO, Exponent::INFINITY];
        let report = gw_verify(alpha, beta, &tests, &[1.0, 0.5, 0.1], &ps, g)?;
        b.rows.extend(rows_of(&report, &format!("gw({alpha},{beta})/")));
        let pinned = fixtures.get(alpha, beta);
        let matches = pinned.is_some_and(|v| (v - est.total).abs() <= FIXTURE_TOLERANCE);
        let passed = est.converged && report.passed && matches;
        Ok((
            passed,
            json!({ "K_est": est.total, "pinned": pinned, "worst_ratio": report.worst_ratio, "cases": report.per_case.len() }),
        ))
    })();
    b.record(&format!("gw_subordination({alpha},{beta})"), outcome);
}

fn gw_convergence(g: &GridSpec) -> Check {
    let f = materialize(&TestFunctionSpec::gaussian(1.0), g)?;
    let mut details = serde_json::Map::new();
    let mut passed = true;
    for alpha in [1.0, 2.0] {
        let errs = [1.0, 0.5, 0.1, 0.05]
            .iter()
            .map(|&eps| Ok(gw_error(&f, alpha, eps, Exponent::TWO)?.error))
            .collect::<Result<Vec<f64>, Error>>()?;
        passed &= errs.windows(2).all(|w| w[1] < w[0]);
        details.insert(format!("alpha={alpha}"), json!(errs));
    }
    Ok((passed, Value::Object(details)))
}

fn identity(g: &GridSpec) -> Check {
    let mut passed = true;
    let mut details = Vec::new();
    for (q, p1, p2) in triples() {
        let admissible = lemma2_hypotheses(&q, &p1, &p2).admissible;
        let dec = lemma2_construct(&q, &p1, &p2, g)?;
        let sup_q = g.dual_nodes().fold(0.0_f64, |acc, y| acc.max(q.eval(y).norm()));
        let r = p1.degree().unwrap_or(0) as u32;
        let cases = verify_identity_suite(&dec, &materialize_all(&default_suite(Purpose::Diffops(r)), g)?)?;
        let worst = cases.iter().filter_map(|c| c.residual).fold(0.0_f64, f64::max);
        let ok = admissible && dec.diagnostics.identity_residual <= 1e-10 * (1.0 + sup_q) && worst <= 1e-6;
        passed &= ok;
        details.push(json!({
            "triple": [q.to_string(), p1.to_string(), p2.to_string()],
            "identity_residual": dec.diagnostics.identity_residual,
            "worst_operator_residual": worst,
            "passed": ok,
        }));
    }
    Ok((passed, json!(details)))
}

fn landau(b: &mut Battery, g: &GridSpec) {
    let outcome = (|| {
        let dec = lemma2_construct(&poly(&[0.0, 1.0]), &poly(&[0.0, 0.0, 1.0]), &poly(&[1.0]), g)?;
        let tests = materialize_all(&default_suite(Purpose::Diffops(2)), g)?;
        let mut passed = true;
        let mut details = Vec::new();
        for (q, p1, p2) in [("1", "1", "1"), ("2", "2", "2"), ("inf", "inf", "inf"), ("2", "2", "1"), ("2", "1", "1")] {
            let exps = DiffopExponents {
                q: q.parse()?,
                p1: p1.parse()?,
                p2: p2.parse()?,
            };
            let rep = diffop_subordination(&dec, exps, &tests, g)?;
            b.rows.extend(rows_of(&rep.report, &format!("diffop({exps})/")));
            passed &= rep.report.passed;
            details.push(json!({ "exponents": exps.to_string(), "C_est": rep.report.constant, "worst_ratio": rep.report.worst_ratio }));
        }
        Ok((passed, json!(details)))
    })();
    b.record("diffop_subordination(x,x^2,1)", outcome);
}

fn rejection(g: &GridSpec) -> Check {
    let witness = lemma2_hypotheses(&poly(&[1.0]), &poly(&[0.0, 1.0]), &poly(&[0.0, 1.0]));
    let degree = lemma2_hypotheses(&poly(&[0.0, 0.0, 1.0]), &poly(&[0.0, 1.0]), &poly(&[1.0]));
    let obstruction = lemma2_construct(&poly(&[0.0, 1.0]), &poly(&[0.0, 0.0, 1.0]), &poly(&[0.0, 0.0, 1.0]), g);
    let obstructed = matches!(obstruction, Err(Error::MultiplicityObstruction { .. }));
    let passed = !witness.admissible && !degree.admissible && obstructed;
    Ok((
        passed,
        json!({
            "common_zero": witness.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "degree": degree.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "obstruction": obstruction.err().map(|e| e.to_string()),
        }),
    ))
}

pub fn run(g: &GridSpec, fixtures: &GwFixtureFile) -> (Value, Vec<CsvRow>, bool) {
    let mut b = Battery {
        checks: Vec::new(),
        rows: Vec::new(),
        passed: true,
    };
    b.record("transform_oracle", transform_oracle());
    b.record("wiener_calibration", wiener_calibration(g));
    b.record("comparison_reflexivity", reflexivity(g));
    for (alpha, beta) in GW_PAIRS {
        gw_pair(&mut b, alpha, beta, g, fixtures);
    }
    b.record("gw_error_monotone", gw_convergence(g));
    b.record("decomposition_identity", identity(g));
    landau(&mut b, g);
    b.record("hypothesis_rejection", rejection(g));
    (json!({ "checks": b.checks }), b.rows, b.passed)
}
