//! Executes a [`RunConfig`] and collects the report.

use serde::Serialize;
use serde_json::{json, Value};
use subord_core::diffops::{verify_identity_suite, DiffopExponents, IdentityCase};
use subord_core::fixtures::{GwFixtureFile, FIXTURE_TOLERANCE};
use subord_core::{
    carlson_sufficient_bound, comparison_constant, default_suite, diffop_subordination, gw_constant, gw_verify,
    lemma2_construct, lemma2_hypotheses, materialize_all, verify_subordination, wiener_norm_estimate, ComparisonSetup,
    Error, ErrorClass, GridSpec, Lemma2Decomposition, Multiplier, Polynomial, Purpose, SubordinationReport,
};

use crate::config::{CommandConfig, RunConfig};
use crate::selftest;

pub const EXIT_PASSED: i32 = 0;
pub const EXIT_HYPOTHESIS: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_INVALID: i32 = 3;

/// Identity residual allowed per test function in `lemma2`.
const IDENTITY_TOLERANCE: f64 = 1e-6;
/// Pointwise residual of `Q - h₁P₁ - h₂P₂`, relative to `1 + sup|Q|`.
const DECOMPOSITION_TOLERANCE: f64 = 1e-10;

/// One flat row of the CSV summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsvRow {
    pub case_id: String,
    pub test_function: String,
    pub p_or_exponents: String,
    pub epsilon: Option<f64>,
    pub lhs_norm: Option<f64>,
    pub rhs_norm: Option<f64>,
    pub ratio: Option<f64>,
    pub constant: f64,
    pub passed: Option<bool>,
}

pub fn rows_of(report: &SubordinationReport, prefix: &str) -> Vec<CsvRow> {
    let finite = |v: f64| v.is_finite().then_some(v);
    report
        .per_case
        .iter()
        .map(|c| CsvRow {
            case_id: format!("{prefix}{}", c.case_id),
            test_function: c.test_function.clone(),
            p_or_exponents: c.p_or_exponents.clone(),
            epsilon: c.epsilon,
            lhs_norm: finite(c.lhs_norm),
            rhs_norm: finite(c.rhs_norm),
            ratio: c.ratio,
            constant: report.constant,
            passed: c.ratio.map(|r| r <= report.constant * (1.0 + report.tolerance)),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub report: Value,
    pub rows: Vec<CsvRow>,
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e.class() {
        ErrorClass::Hypothesis => EXIT_HYPOTHESIS,
        ErrorClass::Numerical => EXIT_NUMERICAL,
        ErrorClass::Invalid => EXIT_INVALID,
    }
}

pub fn error_value(e: &Error) -> Value {
    json!({ "kind": e.kind(), "message": e.to_string() })
}

/// What a command produced before the verdict is attached.
struct Partial {
    result: Value,
    rows: Vec<CsvRow>,
    passed: bool,
    error: Option<Error>,
}

impl Partial {
    fn done(result: Value, rows: Vec<CsvRow>, passed: bool) -> Self {
        Self {
            result,
            rows,
            passed,
            error: None,
        }
    }

    fn failed(result: Value, error: Error) -> Self {
        Self {
            result,
            rows: Vec::new(),
            passed: false,
            error: Some(error),
        }
    }
}

fn status_of(code: i32) -> &'static str {
    match code {
        EXIT_PASSED => "passed",
        EXIT_HYPOTHESIS => "hypothesis_violation",
        EXIT_NUMERICAL => "numerical_failure",
        _ => "invalid_config",
    }
}

/// Runs `config`. `fixtures` supplies the pinned constants for comparison.
pub fn run(config: &RunConfig, fixtures: &GwFixtureFile) -> Outcome {
    let grid = match config.grid() {
        Ok(g) => g,
        Err(e) => {
            return Outcome {
                exit_code: EXIT_INVALID,
                report: json!({ "error": { "kind": "invalid_config", "message": e.0 } }),
                rows: Vec::new(),
            }
        }
    };
    let partial = match &config.command {
        CommandConfig::WienerNorm { multiplier } => wiener_norm(&Multiplier::from(multiplier.clone()), &grid),
        CommandConfig::GwCompare { alpha, beta, eps, p } => gw_compare(*alpha, *beta, eps, p, &grid, fixtures),
        CommandConfig::Lemma2 {
            q_poly,
            p1_poly,
            p2_poly,
        } => lemma2(q_poly, p1_poly, p2_poly, &grid),
        CommandConfig::DiffopVerify {
            q_poly,
            p1_poly,
            p2_poly,
            q,
            p1,
            p2,
        } => {
            let exps = DiffopExponents {
                q: *q,
                p1: p1.unwrap_or(*q),
                p2: p2.unwrap_or(*q),
            };
            diffop_verify(q_poly, p1_poly, p2_poly, exps, &grid)
        }
        CommandConfig::Compare {
            m1,
            m2,
            p,
            zero_tolerance,
            fill,
        } => {
            let mut setup = ComparisonSetup::new(m1.clone().into(), m2.clone().into());
            if let Some(t) = zero_tolerance {
                setup = setup.with_zero_tolerance(*t);
            }
            if let Some(f) = fill {
                setup = setup.with_fill(f.clone());
            }
            compare(&setup, p, &grid)
        }
        CommandConfig::Selftest => {
            let (result, rows, passed) = selftest::run(&grid, fixtures);
            Partial::done(result, rows, passed)
        }
    };
    let exit_code = match &partial.error {
        Some(e) => exit_code_for(e),
        None if partial.passed => EXIT_PASSED,
        None => EXIT_NUMERICAL,
    };
    let report = json!({
        "command": config.command.name(),
        "config": config.to_value(),
        "exit_code": exit_code,
        "status": status_of(exit_code),
        "passed": exit_code == EXIT_PASSED,
        "result": partial.result,
        "error": partial.error.as_ref().map(error_value),
    });
    Outcome {
        exit_code,
        report,
        rows: partial.rows,
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn wiener_norm(psi: &Multiplier, grid: &GridSpec) -> Partial {
    let est = match wiener_norm_estimate(psi, grid) {
        Ok(e) => e,
        Err(e) => return Partial::failed(json!({ "multiplier": psi.to_string() }), e),
    };
    let carlson = match carlson_sufficient_bound(psi, grid) {
        Ok(b) => json!({ "bound": b }),
        Err(e) => json!({ "not_applicable": e.to_string() }),
    };
    let result = json!({
        "multiplier": psi.to_string(),
        "estimate": to_value(&est),
        "carlson_sufficient_bound": carlson,
    });
    if est.converged {
        Partial::done(result, Vec::new(), true)
    } else {
        let e = Error::NonConvergent(format!("total {} vs refined {}", est.total, est.refined_total));
        Partial::failed(result, e)
    }
}

fn gw_compare(alpha: f64, beta: f64, eps: &[f64], ps: &[subord_core::Exponent], grid: &GridSpec, fixtures: &GwFixtureFile) -> Partial {
    let tests = match materialize_all(&default_suite(Purpose::Means), grid) {
        Ok(t) => t,
        Err(e) => return Partial::failed(Value::Null, e),
    };
    let est = match gw_constant(alpha, beta, grid) {
        Ok(e) => e,
        Err(e) => return Partial::failed(Value::Null, e),
    };
    let pinned = fixtures.get(alpha, beta);
    let mut result = json!({
        "alpha": alpha,
        "beta": beta,
        "K_est": est.total,
        "estimate": to_value(&est),
        "pinned": pinned,
        "matches_pinned": pinned.map(|v| (v - est.total).abs() <= FIXTURE_TOLERANCE),
    });
    match gw_verify(alpha, beta, &tests, eps, ps, grid) {
        Ok(report) => {
            let rows = rows_of(&report, "");
            let passed = report.passed;
            result["report"] = to_value(&report);
            Partial::done(result, rows, passed)
        }
        Err(e) => Partial::failed(result, e),
    }
}

fn identity_value(cases: &[IdentityCase]) -> Value {
    to_value(&cases)
}

fn decomposition_value(dec: &Lemma2Decomposition) -> Value {
    json!({
        "h1": dec.h1.to_string(),
        "h2": dec.h2.to_string(),
        "neighborhoods": to_value(&dec.neighborhoods),
        "diagnostics": to_value(&dec.diagnostics),
    })
}

fn sup_on_grid(p: &Polynomial, grid: &GridSpec) -> f64 {
    grid.dual_nodes().fold(0.0_f64, |acc, y| acc.max(p.eval(y).norm()))
}

fn polys_value(q: &Polynomial, p1: &Polynomial, p2: &Polynomial) -> Value {
    json!({ "Q": q.to_string(), "P1": p1.to_string(), "P2": p2.to_string() })
}

fn lemma2(q: &Polynomial, p1: &Polynomial, p2: &Polynomial, grid: &GridSpec) -> Partial {
    let check = lemma2_hypotheses(q, p1, p2);
    let mut result = json!({
        "polynomials": polys_value(q, p1, p2),
        "admissible": check.admissible,
        "violations": to_value(&check.violations),
    });
    let dec = match lemma2_construct(q, p1, p2, grid) {
        Ok(d) => d,
        Err(e) => return Partial::failed(result, e),
    };
    result["decomposition"] = decomposition_value(&dec);
    let r = p1.degree().unwrap_or(0) as u32;
    let cases = match materialize_all(&default_suite(Purpose::Diffops(r)), grid).and_then(|t| verify_identity_suite(&dec, &t)) {
        Ok(c) => c,
        Err(e) => return Partial::failed(result, e),
    };
    let bound = DECOMPOSITION_TOLERANCE * (1.0 + sup_on_grid(q, grid));
    let identity_ok = dec.diagnostics.identity_residual <= bound;
    let cases_ok = cases.iter().filter_map(|c| c.residual).all(|r| r <= IDENTITY_TOLERANCE);
    result["identity_bound"] = json!(bound);
    result["identity_cases"] = identity_value(&cases);
    result["identity_case_tolerance"] = json!(IDENTITY_TOLERANCE);
    Partial::done(result, Vec::new(), identity_ok && cases_ok)
}

fn diffop_verify(q: &Polynomial, p1: &Polynomial, p2: &Polynomial, exps: DiffopExponents, grid: &GridSpec) -> Partial {
    let check = lemma2_hypotheses(q, p1, p2);
    let mut result = json!({
        "polynomials": polys_value(q, p1, p2),
        "exponents": to_value(&exps),
        "admissible": check.admissible,
        "violations": to_value(&check.violations),
    });
    let dec = match lemma2_construct(q, p1, p2, grid) {
        Ok(d) => d,
        Err(e) => return Partial::failed(result, e),
    };
    result["decomposition"] = decomposition_value(&dec);
    let r = p1.degree().unwrap_or(0) as u32;
    let tests = match materialize_all(&default_suite(Purpose::Diffops(r)), grid) {
        Ok(t) => t,
        Err(e) => return Partial::failed(result, e),
    };
    match diffop_subordination(&dec, exps, &tests, grid) {
        Ok(rep) => {
            let rows = rows_of(&rep.report, "");
            result["C_est"] = json!(rep.report.constant);
            result["factors"] = to_value(&rep.factors);
            result["report"] = to_value(&rep.report);
            Partial::done(result, rows, rep.report.passed)
        }
        Err(e) => Partial::failed(result, e),
    }
}

fn compare(setup: &ComparisonSetup, ps: &[subord_core::Exponent], grid: &GridSpec) -> Partial {
    let mut result = json!({
        "m1": setup.m1.to_string(),
        "m2": setup.m2.to_string(),
        "zero_tolerance": setup.zero_tolerance,
        "fill_policy": to_value(&setup.fill_policy),
    });
    let est = match comparison_constant(setup, grid) {
        Ok(e) => e,
        Err(e) => return Partial::failed(result, e),
    };
    result["K_est"] = json!(est.total);
    result["estimate"] = to_value(&est);
    let tests = match materialize_all(&default_suite(Purpose::Means), grid) {
        Ok(t) => t,
        Err(e) => return Partial::failed(result, e),
    };
    match verify_subordination(setup, &tests, ps, grid) {
        Ok(report) => {
            let rows = rows_of(&report, "");
            let passed = report.passed;
            result["report"] = to_value(&report);
            Partial::done(result, rows, passed)
        }
        Err(e) => Partial::failed(result, e),
    }
}
