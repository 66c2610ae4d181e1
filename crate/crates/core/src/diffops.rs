//! Constant-coefficient differential operators `P(-i d/dx)`, the splitting
//! `Q = h₁P₁ + h₂P₂` with `h₁, h₂` in the Wiener algebra, and the resulting
//! two-term inequality `‖Q f‖_q ≤ C(‖P₁f‖_{p₁} + ‖P₂f‖_{p₂})`.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{forward_ft, inverse_raw, lp_norm};
use crate::grid::{Exponent, GridSpec, SampledFunction, Side};
use crate::multiplier::{Multiplier, Piece, Piecewise};
use crate::polynomial::{real_roots, Polynomial, RootSet, DEFAULT_CLUSTER_TOLERANCE};
use crate::report::{CaseRecord, SubordinationReport};
use crate::testkit::TestFunction;
use crate::wiener::{density, wiener_norm_estimate};

const COMMON_ZERO_RESIDUAL: f64 = 1e-8;
const DEGENERATE_SEPARATION: f64 = 1e-8;
const GROWTH_LIMIT: f64 = 1.5;
const DEFLATION_RESIDUAL: f64 = 1e-7;
const BANDWIDTH_TAIL: f64 = 1e-8;
/// `|f̂|` below this fraction of its peak is FFT roundoff.
const ROUNDOFF_FLOOR: f64 = 1e-13;
const EDGE_FRACTION: f64 = 0.05;
pub const DIFFOP_TOLERANCE: f64 = 1e-2;

/// A failed clause of the splitting hypotheses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "clause", rename_all = "snake_case")]
pub enum Violation {
    ZeroPolynomial { name: String },
    DegreeQ { deg_q: usize, r: usize },
    DegreeP2 { deg_p2: usize, r: usize },
    CommonZero { location: f64, q_abs: f64 },
    RootFinding { message: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroPolynomial { name } => write!(f, "{name} is the zero polynomial"),
            Violation::DegreeQ { deg_q, r } => write!(f, "deg Q = {deg_q} exceeds deg P1 = {r}"),
            Violation::DegreeP2 { deg_p2, r } => write!(f, "deg P2 = {deg_p2} exceeds deg P1 = {r}"),
            Violation::CommonZero { location, q_abs } => {
                write!(f, "common real zero x = {location} of P1 and P2 where |Q| = {q_abs:e}")
            }
            Violation::RootFinding { message } => write!(f, "root finding failed: {message}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub admissible: bool,
    pub violations: Vec<Violation>,
}

/// Real zeros of `a` that are also zeros of `b`.
fn common_zeros(a: &RootSet, b: &RootSet) -> Vec<f64> {
    a.locations().filter(|&x| b.find(x).is_some()).collect()
}

pub fn lemma2_hypotheses(q: &Polynomial, p1: &Polynomial, p2: &Polynomial) -> HypothesisCheck {
    let mut violations = Vec::new();
    for (name, p) in [("P1", p1), ("P2", p2)] {
        if p.is_zero() {
            violations.push(Violation::ZeroPolynomial { name: name.into() });
        }
    }
    if let Some(r) = p1.degree() {
        if let Some(deg_q) = q.degree().filter(|&d| d > r) {
            violations.push(Violation::DegreeQ { deg_q, r });
        }
        if let Some(deg_p2) = p2.degree().filter(|&d| d > r) {
            violations.push(Violation::DegreeP2 { deg_p2, r });
        }
    }
    if violations.is_empty() {
        match (real_roots(p1, DEFAULT_CLUSTER_TOLERANCE), real_roots(p2, DEFAULT_CLUSTER_TOLERANCE)) {
            (Ok(r1), Ok(r2)) => {
                for x in common_zeros(&r1, &r2) {
                    let q_abs = q.eval(x).norm();
                    if q_abs > COMMON_ZERO_RESIDUAL * q.magnitude_at(x).max(1.0) {
                        violations.push(Violation::CommonZero { location: x, q_abs });
                    }
                }
            }
            (Err(e), _) | (_, Err(e)) => violations.push(Violation::RootFinding { message: e.to_string() }),
        }
    }
    HypothesisCheck {
        admissible: violations.is_empty(),
        violations,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Neighborhood {
    pub center: f64,
    pub delta: f64,
}

impl Neighborhood {
    fn start(&self) -> f64 {
        self.center - self.delta
    }

    fn end(&self) -> f64 {
        self.center + self.delta
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub identity_residual: f64,
    pub h2_sup: f64,
    pub lip_h1: f64,
    pub lip_h2: f64,
    /// `h₁(∞)`, extrapolated from values at 1, 2 and 4 times the dual-grid edge.
    pub h1_infinity: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma2Decomposition {
    pub q: Polynomial,
    pub p1: Polynomial,
    pub p2: Polynomial,
    pub h1: Multiplier,
    pub h2: Multiplier,
    pub neighborhoods: Vec<Neighborhood>,
    pub diagnostics: Diagnostics,
}

fn neighborhoods(r1: &RootSet, r2: &RootSet) -> Result<Vec<Neighborhood>> {
    let centers: Vec<f64> = r1.locations().collect();
    for w in centers.windows(2) {
        if w[1] - w[0] < DEGENERATE_SEPARATION {
            return Err(Error::NeighborhoodDegenerate { a: w[0], b: w[1] });
        }
    }
    let interfering: Vec<f64> = r2.locations().filter(|&x| r1.find(x).is_none()).collect();
    Ok(centers
        .iter()
        .map(|&c| {
            let mut delta: f64 = 1.0;
            for &z in &interfering {
                delta = delta.min((z - c).abs() / 2.0);
            }
            for &o in centers.iter().filter(|&&o| o != c) {
                delta = delta.min((o - c).abs() / 2.0);
            }
            Neighborhood { center: c, delta }
        })
        .collect())
}

/// Divides `(x - x0)` out of `n` up to `max` times while `x0` is a root.
fn deflate_at(mut n: Polynomial, x0: f64, max: usize) -> (Polynomial, usize) {
    let mut count = 0;
    while count < max && !n.is_zero() {
        let scale = n.magnitude_at(x0).max(f64::MIN_POSITIVE);
        if n.eval(x0).norm() > DEFLATION_RESIDUAL * scale {
            break;
        }
        n = n.deflate(x0).0;
        count += 1;
    }
    (n, count)
}

fn limit_of_ratio(q: &Polynomial, p1: &Polynomial) -> Complex64 {
    match (q.degree(), p1.degree()) {
        (Some(dq), Some(d1)) if dq == d1 => q.leading().unwrap_or_default() / p1.leading().unwrap_or_default(),
        _ => Complex64::new(0.0, 0.0),
    }
}

/// Samples of `[c - δ, c + δ]` at spacing about `h`, offset so that `c`
/// itself sits halfway between two samples.
fn local_points(nb: &Neighborhood, h: f64) -> Vec<f64> {
    let n = (nb.delta / h).ceil().max(1.0) as usize;
    let step = nb.delta / n as f64;
    let mut pts: Vec<f64> = (0..n).rev().map(|i| nb.center - (i as f64 + 0.5) * step).collect();
    pts.extend((0..n).map(|i| nb.center + (i as f64 + 0.5) * step));
    pts
}

fn sup_abs(m: &Multiplier, points: &[f64]) -> f64 {
    points.iter().fold(0.0, |acc, &y| {
        let v = m.eval(y).norm();
        if v.is_nan() {
            f64::INFINITY
        } else {
            acc.max(v)
        }
    })
}

fn lipschitz(m: &Multiplier, points: &[f64]) -> f64 {
    points
        .windows(2)
        .filter(|w| w[1] > w[0])
        .fold(0.0, |acc, w| acc.max((m.eval(w[1]) - m.eval(w[0])).norm() / (w[1] - w[0])))
}

/// Builds `h₁, h₂` with `Q = h₁P₁ + h₂P₂`: `h₁ = Q/P₁` and `h₂ = 0` away from
/// the real zeros of `P₁`; in a neighbourhood of each zero `h₁` is the linear
/// interpolant of `Q/P₁` between the endpoints and `h₂ = (Q - h₁P₁)/P₂`.
pub fn lemma2_construct(q: &Polynomial, p1: &Polynomial, p2: &Polynomial, grid: &GridSpec) -> Result<Lemma2Decomposition> {
    let check = lemma2_hypotheses(q, p1, p2);
    if !check.admissible {
        return Err(Error::HypothesesViolated(check.violations.iter().map(|v| v.to_string()).collect()));
    }
    let r1 = real_roots(p1, DEFAULT_CLUSTER_TOLERANCE)?;
    let r2 = real_roots(p2, DEFAULT_CLUSTER_TOLERANCE)?;
    let hoods = neighborhoods(&r1, &r2)?;
    let limit = limit_of_ratio(q, p1);
    let outside = || Piece::Rational {
        numerator: q.clone(),
        denominator: p1.clone(),
    };

    let mut breakpoints = Vec::new();
    let mut h1_pieces = vec![outside()];
    let mut h2_pieces = vec![Piece::Zero];
    for (i, nb) in hoods.iter().enumerate() {
        let (a, b) = (nb.start(), nb.end());
        let va = q.eval(a) / p1.eval(a);
        let vb = q.eval(b) / p1.eval(b);
        let slope = (vb - va) / (b - a);
        // Linear h₁ as a polynomial: va + slope·(x - a).
        let linear = Polynomial::new(vec![va - slope * a, slope]);
        let numerator = q.sub(&linear.mul(p1));
        let m2 = r2.find(nb.center).map_or(0, |r| r.multiplicity);
        let (num, removed) = deflate_at(numerator, nb.center, m2);
        let mut den = p2.clone();
        for _ in 0..removed {
            den = den.deflate(nb.center).0;
        }

        // Touching neighbourhoods share an endpoint: no outside piece between them.
        if breakpoints.last() != Some(&a) {
            breakpoints.push(a);
        } else {
            h1_pieces.pop();
            h2_pieces.pop();
        }
        breakpoints.push(b);
        h1_pieces.push(Piece::Linear {
            start: a,
            value_at_start: va,
            slope,
        });
        h2_pieces.push(Piece::Rational {
            numerator: num,
            denominator: den,
        });
        h1_pieces.push(outside());
        h2_pieces.push(Piece::Zero);
        debug_assert!(i == 0 || hoods[i - 1].end() <= a);
    }
    let h1 = Multiplier::Piecewise(Piecewise::new(breakpoints.clone(), h1_pieces, limit)?);
    let h2 = Multiplier::Piecewise(Piecewise::new(breakpoints, h2_pieces, Complex64::new(0.0, 0.0))?);

    // Boundedness certificate for h₂ on two refinements of the local grids.
    let dy = grid.dual_spacing();
    let mut local = Vec::new();
    for nb in &hoods {
        let coarse_points = local_points(nb, dy / 16.0);
        let coarse = sup_abs(&h2, &coarse_points);
        let fine = sup_abs(&h2, &local_points(nb, dy / 32.0));
        let growth = if coarse > 0.0 { fine / coarse } else { 1.0 };
        if !(growth < GROWTH_LIMIT) || !fine.is_finite() {
            return Err(Error::MultiplicityObstruction {
                center: nb.center,
                growth,
            });
        }
        local.extend(coarse_points);
    }

    let mut points: Vec<f64> = grid.dual_nodes().chain(local).collect();
    points.sort_by(f64::total_cmp);
    let identity_residual = points.iter().fold(0.0_f64, |acc, &y| {
        acc.max((q.eval(y) - h1.eval(y) * p1.eval(y) - h2.eval(y) * p2.eval(y)).norm())
    });
    let edge = grid.nyquist();
    // h₁ = ℓ + a/y + b/y² + O(y⁻³) at infinity: two Richardson steps remove a and b.
    let first = |y: f64| 2.0 * h1.eval(2.0 * y) - h1.eval(y);
    let second = |y: f64| (4.0 * first(2.0 * y) - first(y)) / 3.0;
    let h1_infinity = (second(edge) + second(-edge)) / 2.0;
    let diagnostics = Diagnostics {
        identity_residual,
        h2_sup: sup_abs(&h2, &points),
        lip_h1: lipschitz(&h1, &points),
        lip_h2: lipschitz(&h2, &points),
        h1_infinity,
    };

    Ok(Lemma2Decomposition {
        q: q.clone(),
        p1: p1.clone(),
        p2: p2.clone(),
        h1,
        h2,
        neighborhoods: hoods,
        diagnostics,
    })
}

fn poly_samples(p: &Polynomial, grid: &GridSpec) -> Vec<Complex64> {
    grid.dual_nodes().map(|y| p.eval(y)).collect()
}

/// `P(y) f̂(y)` after checking that it is resolved by the dual grid.
fn symbol_times_spectrum(p: &Polynomial, f_hat: &SampledFunction) -> Result<Vec<Complex64>> {
    let grid = f_hat.grid();
    let spec = f_hat.values();
    let prod: Vec<Complex64> = poly_samples(p, grid).iter().zip(spec).map(|(a, b)| a * b).collect();
    let n = prod.len();
    let band = ((n as f64 * EDGE_FRACTION) as usize).max(1);
    let edge = |v: &[Complex64]| {
        v[..band]
            .iter()
            .chain(&v[n - band..])
            .fold(0.0_f64, |acc, z| acc.max(z.norm()))
    };
    let peak = prod.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
    let f_peak = f_hat.max_abs();
    if peak > 0.0 {
        let ratio = edge(&prod) / peak;
        if ratio > BANDWIDTH_TAIL && edge(spec) > ROUNDOFF_FLOOR * f_peak {
            return Err(Error::BandwidthExceeded { ratio });
        }
    }
    Ok(prod)
}

/// `P(-i d/dx) f = F⁻¹(P(y) f̂)`.
pub fn apply_diffop(p: &Polynomial, f: &SampledFunction) -> Result<SampledFunction> {
    let f_hat = forward_ft(f)?;
    let prod = symbol_times_spectrum(p, &f_hat)?;
    SampledFunction::new(*f.grid(), inverse_raw(f.grid(), prod), Side::Space)
}

/// Closed interval of norm indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentRange {
    pub lo: Exponent,
    pub hi: Exponent,
}

impl ExponentRange {
    pub fn contains(&self, p: Exponent) -> bool {
        self.lo <= p && p <= self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YoungExponents {
    pub p1: ExponentRange,
    pub p2: ExponentRange,
}

/// Admissible `p₁, p₂` for a target `q`: `p₁ = q` when `deg Q = deg P₁`,
/// otherwise any `p₁ ∈ [1, q]`; always `p₂ ∈ [1, q]`.
pub fn young_exponents(q: Exponent, deg_q: usize, deg_p1: usize, _deg_p2: usize) -> Result<YoungExponents> {
    if deg_q > deg_p1 {
        return Err(Error::InadmissibleExponents(format!("deg Q = {deg_q} exceeds deg P1 = {deg_p1}")));
    }
    let full = ExponentRange { lo: Exponent::ONE, hi: q };
    let p1 = if deg_q == deg_p1 { ExponentRange { lo: q, hi: q } } else { full };
    Ok(YoungExponents { p1, p2: full })
}

/// `s` with `1/s = 1 + 1/q - 1/p`, so that `‖g∗u‖_q ≤ ‖g‖_s‖u‖_p`.
pub fn young_partner(q: Exponent, p: Exponent) -> Result<Exponent> {
    if p > q {
        return Err(Error::InadmissibleExponents(format!("p = {p} exceeds q = {q}")));
    }
    Exponent::from_reciprocal(1.0 + q.reciprocal() - p.reciprocal())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidual {
    /// `‖lhs - rhs‖_∞ / (1 + ‖lhs‖_∞)`.
    pub residual: f64,
    pub lhs_sup: f64,
}

/// Compares `Q(D)f` with `F⁻¹(h₁·P₁f̂) + F⁻¹(h₂·P₂f̂)`.
pub fn verify_identity(dec: &Lemma2Decomposition, f: &SampledFunction) -> Result<IdentityResidual> {
    let grid = f.grid();
    let f_hat = forward_ft(f)?;
    let lhs = inverse_raw(grid, symbol_times_spectrum(&dec.q, &f_hat)?);
    let a = symbol_times_spectrum(&dec.p1, &f_hat)?;
    let b = symbol_times_spectrum(&dec.p2, &f_hat)?;
    let combined: Vec<Complex64> = grid
        .dual_nodes()
        .zip(a.iter().zip(&b))
        .map(|(y, (u, v))| dec.h1.eval(y) * u + dec.h2.eval(y) * v)
        .collect();
    let rhs = inverse_raw(grid, combined);
    let lhs_sup = lhs.iter().fold(0.0_f64, |acc, v| acc.max(v.norm()));
    let diff = lhs.iter().zip(&rhs).fold(0.0_f64, |acc, (u, v)| acc.max((u - v).norm()));
    Ok(IdentityResidual {
        residual: diff / (1.0 + lhs_sup),
        lhs_sup,
    })
}

/// Outcome of [`verify_identity`] on one test function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCase {
    pub test_function: String,
    pub residual: Option<f64>,
    pub skip_reason: Option<String>,
}

/// [`verify_identity`] over a suite; functions the grid cannot resolve under
/// the operators are recorded as skipped.
pub fn verify_identity_suite(dec: &Lemma2Decomposition, tests: &[TestFunction]) -> Result<Vec<IdentityCase>> {
    tests
        .par_iter()
        .map(|t| match verify_identity(dec, &t.function) {
            Ok(r) => Ok(IdentityCase {
                test_function: t.id.clone(),
                residual: Some(r.residual),
                skip_reason: None,
            }),
            Err(e @ Error::BandwidthExceeded { .. }) => Ok(IdentityCase {
                test_function: t.id.clone(),
                residual: None,
                skip_reason: Some(e.to_string()),
            }),
            Err(e) => Err(e),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffopExponents {
    pub q: Exponent,
    pub p1: Exponent,
    pub p2: Exponent,
}

impl fmt::Display for DiffopExponents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q={};p1={};p2={}", self.q, self.p1, self.p2)
    }
}

/// How the constant in front of one term was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermFactor {
    /// Wiener norm of `hᵢ` when `pᵢ = q`, otherwise the `L_s` norm of its density.
    pub value: f64,
    pub partner: Exponent,
    pub wiener: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffopReport {
    pub exponents: DiffopExponents,
    pub factors: [TermFactor; 2],
    pub report: SubordinationReport,
}

fn term_factor(h: &Multiplier, q: Exponent, p: Exponent, grid: &GridSpec) -> Result<TermFactor> {
    let partner = young_partner(q, p)?;
    if p == q {
        let est = wiener_norm_estimate(h, grid)?.require_converged()?;
        return Ok(TermFactor {
            value: est.total,
            partner,
            wiener: true,
        });
    }
    let limit = h.known_limit().unwrap_or_default();
    if limit.norm() > 0.0 {
        return Err(Error::InadmissibleExponents(format!(
            "p = {p} < q = {q} needs a multiplier vanishing at infinity, limit is {limit}"
        )));
    }
    let g = density(h, limit, grid)?;
    Ok(TermFactor {
        value: lp_norm(&g, partner),
        partner,
        wiener: false,
    })
}

/// Checks `‖Q(D)f‖_q ≤ C(‖P₁(D)f‖_{p₁} + ‖P₂(D)f‖_{p₂})` over `tests`, with
/// `C` the larger of the two Young factors of `h₁, h₂`.
pub fn diffop_subordination(
    dec: &Lemma2Decomposition,
    exponents: DiffopExponents,
    tests: &[TestFunction],
    grid: &GridSpec,
) -> Result<DiffopReport> {
    let deg = |p: &Polynomial| p.degree().unwrap_or(0);
    let ranges = young_exponents(exponents.q, deg(&dec.q), deg(&dec.p1), deg(&dec.p2))?;
    if !ranges.p1.contains(exponents.p1) || !ranges.p2.contains(exponents.p2) {
        return Err(Error::InadmissibleExponents(format!(
            "{exponents}: p1 must lie in [{}, {}], p2 in [{}, {}]",
            ranges.p1.lo, ranges.p1.hi, ranges.p2.lo, ranges.p2.hi
        )));
    }
    let factors = [
        term_factor(&dec.h1, exponents.q, exponents.p1, grid)?,
        term_factor(&dec.h2, exponents.q, exponents.p2, grid)?,
    ];
    let constant = factors[0].value.max(factors[1].value);
    let label = exponents.to_string();
    let cases: Vec<CaseRecord> = tests
        .par_iter()
        .map(|t| {
            let parts = [&dec.q, &dec.p1, &dec.p2].map(|p| apply_diffop(p, &t.function));
            match parts {
                [Ok(qf), Ok(f1), Ok(f2)] => {
                    let lhs = lp_norm(&qf, exponents.q);
                    let rhs = lp_norm(&f1, exponents.p1) + lp_norm(&f2, exponents.p2);
                    Ok(CaseRecord::measured(&t.id, label.clone(), None, lhs, rhs))
                }
                [a, b, c] => {
                    let err = [a, b, c].into_iter().find_map(|r| r.err()).expect("one part failed");
                    match err {
                        Error::BandwidthExceeded { .. } => Ok(CaseRecord::skipped(&t.id, label.clone(), None, err.to_string())),
                        e => Err(e),
                    }
                }
            }
        })
        .collect::<Result<_>>()?;
    Ok(DiffopReport {
        exponents,
        factors,
        report: SubordinationReport::from_cases(constant, DIFFOP_TOLERANCE, cases)?,
    })
}
