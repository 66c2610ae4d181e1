//! Acceptance battery: one PASS/FAIL line per criterion.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use subord_core::diffops::{verify_identity_suite, DiffopExponents, Violation};
use subord_core::fixtures::pinned_gw_constants;
use subord_core::testkit::TestFunctionSpec;
use subord_core::*;

type Outcome = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn default_grid() -> GridSpec {
    GridSpec::new(40.0, 16384).unwrap()
}

fn poly(c: &[f64]) -> Polynomial {
    Polynomial::from_real(c)
}

fn transform_oracle() -> Outcome {
    let g = e(GridSpec::new(20.0, 4096))?;
    let f = e(materialize(&TestFunctionSpec::gaussian(1.0), &g))?;
    let fh = e(forward_ft(&f))?;
    let mut worst: f64 = 0.0;
    for (k, v) in fh.values().iter().enumerate() {
        let y = g.dual_node(k);
        if y.abs() <= 10.0 {
            let exact = PI.sqrt() * (-y * y / 4.0).exp();
            worst = worst.max((v - exact).norm() / exact);
        }
    }
    let round_trip = e(e(inverse_ft(&fh))?.sub(&f))?.max_abs();
    ensure(worst <= 1e-6, format!("relative error {worst:e}"))?;
    ensure(round_trip <= 1e-10, format!("round trip {round_trip:e}"))?;
    Ok(format!("max rel err {worst:.2e}, round trip {round_trip:.2e}"))
}

fn wiener_calibration() -> Outcome {
    let g = default_grid();
    let exp_abs: Multiplier = Registry::ExpAbs { rate: 1.0 }.into();
    let one = Multiplier::constant(1.0);
    let a = e(wiener_norm_estimate(&exp_abs, &g))?;
    let b = e(wiener_norm_estimate(&one, &g))?;
    ensure(a.converged && (a.total - 1.0).abs() <= 1e-3, format!("e^-|y|: {} converged={}", a.total, a.converged))?;
    ensure(b.total == 1.0, format!("constant: {}", b.total))?;
    let ca = e(carlson_sufficient_bound(&exp_abs, &g))?;
    let cb = e(carlson_sufficient_bound(&one, &g))?;
    ensure(ca >= a.total && cb >= b.total, format!("carlson {ca}, {cb}"))?;
    Ok(format!("W(e^-|y|) = {:.6}, W(1) = {}, carlson {ca:.3} / {cb}", a.total, b.total))
}

fn reflexivity() -> Outcome {
    let g = default_grid();
    let tests = e(materialize_all(&default_suite(Purpose::Means), &g))?;
    let ps = [Exponent::ONE, Exponent::TWO, Exponent::INFINITY];
    let cases: [(Multiplier, FillPolicy); 3] = [
        (Registry::Lorentzian { rate: 1.0 }.into(), FillPolicy::LimitFill),
        (Registry::GwComplement { alpha: 2.0 }.into(), FillPolicy::LimitFill),
        (
            Registry::Gaussian { rate: 1.0 }.into(),
            FillPolicy::Explicit(vec![(0.0, num_complex::Complex64::new(1.0, 0.0))]),
        ),
    ];
    let mut worst_k: f64 = 0.0;
    for (m, fill) in cases {
        let r = e(verify_subordination(&ComparisonSetup::new(m.clone(), m.clone()).with_fill(fill), &tests, &ps, &g))?;
        ensure((r.constant - 1.0).abs() <= 1e-6, format!("{m}: K = {}", r.constant))?;
        ensure(r.worst_ratio <= 1.0 + 1e-6, format!("{m}: worst {}", r.worst_ratio))?;
        worst_k = worst_k.max((r.constant - 1.0).abs());
    }
    let swapped = ComparisonSetup::new(
        Registry::Lorentzian { rate: 1.0 }.into(),
        Registry::GwComplement { alpha: 1.0 }.into(),
    );
    ensure(
        matches!(ratio_multiplier(&swapped, &g), Err(Error::NestedZerosViolated { .. })),
        "swapped setup accepted",
    )?;
    Ok(format!("|K - 1| <= {worst_k:.1e}, swapped setup rejected"))
}

fn gw_subordination() -> Outcome {
    let g = default_grid();
    let tests = e(materialize_all(&default_suite(Purpose::Means), &g))?;
    let ps = [Exponent::ONE, Exponent::TWO, Exponent::INFINITY];
    let pinned = pinned_gw_constants();
    let mut parts = Vec::new();
    for (alpha, beta) in [(1.0, 2.0), (1.0, 3.0), (2.0, 4.0), (0.5, 1.0)] {
        let est = e(gw_constant(alpha, beta, &g))?;
        ensure(est.converged, format!("({alpha},{beta}) not converged"))?;
        let report = e(gw_verify(alpha, beta, &tests, &[1.0, 0.5, 0.1], &ps, &g))?;
        ensure(report.passed && report.worst_ratio <= est.total * 1.01, format!("({alpha},{beta}) worst {}", report.worst_ratio))?;
        let want = pinned.get(alpha, beta).ok_or(format!("({alpha},{beta}) not pinned"))?;
        ensure((est.total - want).abs() <= 1e-3, format!("({alpha},{beta}): {} vs pinned {want}", est.total))?;
        parts.push(format!("c({alpha},{beta})={:.4}", est.total));
    }
    Ok(parts.join(", "))
}

fn gw_convergence() -> Outcome {
    let g = default_grid();
    let f = e(materialize(&TestFunctionSpec::gaussian(1.0), &g))?;
    for alpha in [1.0, 2.0] {
        let mut errs = Vec::new();
        for eps in [1.0, 0.5, 0.1, 0.05] {
            errs.push(e(gw_error(&f, alpha, eps, Exponent::TWO))?.error);
        }
        ensure(errs.windows(2).all(|w| w[1] < w[0]), format!("alpha={alpha}: {errs:?}"))?;
    }
    Ok("strictly decreasing for alpha = 1, 2".into())
}

fn fixture_triples() -> Vec<(Polynomial, Polynomial, Polynomial)> {
    vec![
        (poly(&[0.0, 1.0]), poly(&[0.0, 0.0, 1.0]), poly(&[1.0])),
        (poly(&[1.0, 0.0, 1.0]), poly(&[1.0, 0.0, 1.0]), poly(&[1.0])),
        (poly(&[0.0, 1.0]), poly(&[0.0, 0.0, 0.0, 1.0]), poly(&[0.0, 1.0])),
        (poly(&[-1.0, 0.0, 1.0]), poly(&[1.0, 0.0, -2.0, 0.0, 1.0]), poly(&[-1.0, 0.0, 1.0])),
    ]
}

fn identity() -> Outcome {
    let g = default_grid();
    let mut worst_identity: f64 = 0.0;
    let mut worst_operator: f64 = 0.0;
    for (q, p1, p2) in fixture_triples() {
        ensure(lemma2_hypotheses(&q, &p1, &p2).admissible, format!("{q} | {p1} | {p2} inadmissible"))?;
        let dec = e(lemma2_construct(&q, &p1, &p2, &g))?;
        let sup_q = g.dual_nodes().fold(0.0_f64, |acc, y| acc.max(q.eval(y).norm()));
        let rel = dec.diagnostics.identity_residual / (1.0 + sup_q);
        ensure(rel <= 1e-10, format!("{q} | {p1} | {p2}: identity residual {rel:e}"))?;
        let suite = e(materialize_all(&default_suite(Purpose::Diffops(p1.degree().unwrap() as u32)), &g))?;
        let cases = e(verify_identity_suite(&dec, &suite))?;
        ensure(cases.iter().any(|c| c.residual.is_some()), "every identity case skipped")?;
        for c in &cases {
            if let Some(r) = c.residual {
                ensure(r <= 1e-6, format!("{q} | {p1} | {p2} on {}: {r:e}", c.test_function))?;
                worst_operator = worst_operator.max(r);
            }
        }
        worst_identity = worst_identity.max(rel);
    }
    Ok(format!("identity residual <= {worst_identity:.1e}, operator residual <= {worst_operator:.1e}"))
}

fn landau() -> Outcome {
    let coarse = default_grid();
    let fine = e(GridSpec::new(80.0, 32768))?;
    let (q, p1, p2) = fixture_triples().remove(0);
    let run = |g: &GridSpec, exps: DiffopExponents| -> std::result::Result<f64, String> {
        let dec = e(lemma2_construct(&q, &p1, &p2, g))?;
        let tests = e(materialize_all(&default_suite(Purpose::Diffops(2)), g))?;
        let r = e(diffop_subordination(&dec, exps, &tests, g))?;
        ensure(r.report.passed, format!("{exps}: worst {} > C {}", r.report.worst_ratio, r.report.constant))?;
        ensure(r.report.constant.is_finite(), format!("{exps}: C not finite"))?;
        Ok(r.report.constant)
    };
    let mut parts = Vec::new();
    for (a, b, c) in [("1", "1", "1"), ("2", "2", "2"), ("inf", "inf", "inf"), ("2", "2", "1"), ("2", "1", "1")] {
        let exps = DiffopExponents {
            q: a.parse().unwrap(),
            p1: b.parse().unwrap(),
            p2: c.parse().unwrap(),
        };
        let c0 = run(&coarse, exps)?;
        let c1 = run(&fine, exps)?;
        ensure((c0 - c1).abs() <= 1e-2, format!("{exps}: C {c0} vs {c1} under refinement"))?;
        parts.push(format!("{exps}: C={c0:.4}"));
    }
    Ok(parts.join(", "))
}

fn rejection() -> Outcome {
    let g = default_grid();
    let check = lemma2_hypotheses(&poly(&[1.0]), &poly(&[0.0, 1.0]), &poly(&[0.0, 1.0]));
    ensure(
        check.violations.iter().any(|v| matches!(v, Violation::CommonZero { location, .. } if location.abs() < 1e-9)),
        format!("no common-zero witness: {:?}", check.violations),
    )?;
    let deg = lemma2_hypotheses(&poly(&[0.0, 0.0, 0.0, 1.0]), &poly(&[0.0, 0.0, 1.0]), &poly(&[0.0, 0.0, 0.0, 1.0]));
    ensure(
        deg.violations.contains(&Violation::DegreeQ { deg_q: 3, r: 2 }) && deg.violations.contains(&Violation::DegreeP2 { deg_p2: 3, r: 2 }),
        format!("degree violations missing: {:?}", deg.violations),
    )?;
    match lemma2_construct(&poly(&[0.0, 1.0]), &poly(&[0.0, 0.0, 1.0]), &poly(&[0.0, 0.0, 1.0]), &g) {
        Err(Error::MultiplicityObstruction { center, growth }) => {
            Ok(format!("witness x = 0, degree clauses named, obstruction at {center} (growth {growth:.2})"))
        }
        other => Err(format!("expected a multiplicity obstruction, got {other:?}")),
    }
}

fn young() -> Outcome {
    let g = e(GridSpec::new(40.0, 8192))?;
    let fs = [
        TestFunctionSpec::gaussian(1.0),
        TestFunctionSpec::exp_abs(1.0),
        TestFunctionSpec::bump(2.0),
        TestFunctionSpec::bspline(4),
        TestFunctionSpec::modulated_gaussian(1.0, 3.0),
    ];
    let exps = [(1.0, 1.0), (2.0, 1.0), (1.0, 2.0), (1.5, 1.5), (4.0, 4.0 / 3.0)];
    let mut count = 0;
    let mut worst: f64 = 0.0;
    for (i, fspec) in fs.iter().enumerate() {
        for (k, &(p, s)) in exps.iter().enumerate().skip(i % 2).take(4) {
            let gspec = &fs[(i + k) % fs.len()];
            let (p, s) = (e(Exponent::new(p))?, e(Exponent::new(s))?);
            let q = e(Exponent::from_reciprocal(p.reciprocal() + s.reciprocal() - 1.0))?;
            let f = e(materialize(fspec, &g))?;
            let h = e(materialize(gspec, &g))?;
            let conv = e(convolve(&f, &h))?.function;
            let ratio = lp_norm(&conv, q) / (lp_norm(&h, s) * lp_norm(&f, p));
            ensure(ratio <= 1.0 + 1e-6, format!("{} * {} (p={p}, s={s}, q={q}): ratio {ratio}", fspec.id, gspec.id))?;
            worst = worst.max(ratio);
            count += 1;
        }
    }
    ensure(count == 20, format!("{count} combinations"))?;
    Ok(format!("{count} combinations, worst ratio {worst:.6}"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut reports = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("selftest{i}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_subord"))
            .args(["selftest", "--out"])
            .arg(&out)
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.code() == Some(0), format!("selftest exited with {status}"))?;
        reports.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    ensure(reports[0] == reports[1], "reports differ")?;
    Ok(format!("{} bytes, identical", reports[0].len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("transform oracle", transform_oracle),
        ("wiener estimator calibration", wiener_calibration),
        ("comparison reflexivity and nested zeros", reflexivity),
        ("mean subordination constants", gw_subordination),
        ("mean convergence", gw_convergence),
        ("decomposition identity", identity),
        ("two-term differential inequality", landau),
        ("hypothesis rejection", rejection),
        ("young inequality", young),
        ("selftest determinism", determinism),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} of 10 passed in {:.1}s", 10 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
