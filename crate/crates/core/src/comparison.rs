//! Comparison of two convolution operators through the ratio of their
//! multipliers: if `m1 = ψ·m2` with `ψ` in the Wiener algebra, then
//! `‖F⁻¹(m1 f̂)‖_p ≤ ‖ψ‖_W ‖F⁻¹(m2 f̂)‖_p` for every `p`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{apply_spectrum, forward_ft, lp_norm};
use crate::grid::{Exponent, GridSpec};
use crate::multiplier::{Multiplier, Quotient};
use crate::report::{CaseRecord, SubordinationReport};
use crate::testkit::TestFunction;
use crate::wiener::{wiener_norm_estimate, WienerEstimate};

pub const DEFAULT_ZERO_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_TOLERANCE: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", content = "values", rename_all = "snake_case")]
pub enum FillPolicy {
    /// Average of the nearest nodes on either side where `m2` is not zero.
    LimitFill,
    /// Values given as `(location, value)`; each zero run takes the nearest.
    Explicit(Vec<(f64, Complex64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonSetup {
    pub m1: Multiplier,
    pub m2: Multiplier,
    pub zero_tolerance: f64,
    pub fill_policy: FillPolicy,
}

impl ComparisonSetup {
    pub fn new(m1: Multiplier, m2: Multiplier) -> Self {
        Self {
            m1,
            m2,
            zero_tolerance: DEFAULT_ZERO_TOLERANCE,
            fill_policy: FillPolicy::LimitFill,
        }
    }

    pub fn with_fill(mut self, fill_policy: FillPolicy) -> Self {
        self.fill_policy = fill_policy;
        self
    }

    pub fn with_zero_tolerance(mut self, zero_tolerance: f64) -> Self {
        self.zero_tolerance = zero_tolerance;
        self
    }
}

fn sup(values: &[Complex64]) -> f64 {
    values.iter().fold(0.0, |acc, v| acc.max(v.norm()))
}

/// The multiplier `m1/m2`, filled on the numerical zero set of `m2`.
pub fn ratio_multiplier(setup: &ComparisonSetup, grid: &GridSpec) -> Result<Multiplier> {
    setup.m1.validate()?;
    setup.m2.validate()?;
    if !(setup.zero_tolerance > 0.0 && setup.zero_tolerance < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "zero tolerance must lie in (0, 1), got {}",
            setup.zero_tolerance
        )));
    }
    let m1 = setup.m1.sample(grid);
    let m2 = setup.m2.sample(grid);
    let sup2 = sup(&m2);
    if sup2 == 0.0 {
        return Err(Error::InvalidParameter("m2 vanishes on the whole grid".into()));
    }
    let threshold2 = setup.zero_tolerance * sup2;
    let threshold1 = setup.zero_tolerance * sup(&m1);
    let is_zero: Vec<bool> = m2.iter().map(|v| v.norm() <= threshold2).collect();
    for (k, _) in is_zero.iter().enumerate().filter(|(_, &z)| z) {
        if m1[k].norm() > threshold1 {
            return Err(Error::NestedZerosViolated {
                y: grid.dual_node(k),
                m1_abs: m1[k].norm(),
            });
        }
    }

    let n = m2.len();
    let mut fills = Vec::new();
    let mut k = 0;
    while k < n {
        if !is_zero[k] {
            k += 1;
            continue;
        }
        let start = k;
        while k < n && is_zero[k] {
            k += 1;
        }
        let end = k; // exclusive
        let value = match &setup.fill_policy {
            FillPolicy::LimitFill => {
                if start == 0 || end == n {
                    return Err(Error::FillUndefined);
                }
                let left = m1[start - 1] / m2[start - 1];
                let right = m1[end] / m2[end];
                (left + right) / 2.0
            }
            FillPolicy::Explicit(values) => {
                let centre = (grid.dual_node(start) + grid.dual_node(end - 1)) / 2.0;
                values
                    .iter()
                    .min_by(|a, b| (a.0 - centre).abs().total_cmp(&(b.0 - centre).abs()))
                    .map(|v| v.1)
                    .ok_or_else(|| Error::InvalidParameter("explicit fill policy without values".into()))?
            }
        };
        fills.extend((start..end).map(|j| (grid.dual_node(j), value)));
    }

    Ok(Multiplier::Quotient(Quotient {
        numerator: Box::new(setup.m1.clone()),
        denominator: Box::new(setup.m2.clone()),
        threshold: threshold2,
        fills,
    }))
}

/// Wiener norm of the ratio: an upper bound for the best constant.
pub fn comparison_constant(setup: &ComparisonSetup, grid: &GridSpec) -> Result<WienerEstimate> {
    let ratio = ratio_multiplier(setup, grid)?;
    wiener_norm_estimate(&ratio, grid)
}

/// Checks `‖F⁻¹(m1 f̂)‖_p ≤ K‖F⁻¹(m2 f̂)‖_p` on every test function and `p`.
pub fn verify_subordination(
    setup: &ComparisonSetup,
    tests: &[TestFunction],
    ps: &[Exponent],
    grid: &GridSpec,
) -> Result<SubordinationReport> {
    let constant = comparison_constant(setup, grid)?.require_converged()?;
    let m1 = setup.m1.sample(grid);
    let m2 = setup.m2.sample(grid);
    let per_test: Vec<Vec<CaseRecord>> = tests
        .par_iter()
        .map(|t| {
            let f_hat = forward_ft(&t.function)?;
            let lhs = apply_spectrum(&f_hat, &m1)?;
            let rhs = apply_spectrum(&f_hat, &m2)?;
            Ok(ps
                .iter()
                .map(|&p| CaseRecord::measured(&t.id, p.to_string(), None, lp_norm(&lhs, p), lp_norm(&rhs, p)))
                .collect())
        })
        .collect::<Result<_>>()?;
    SubordinationReport::from_cases(constant.total, DEFAULT_TOLERANCE, per_test.into_iter().flatten().collect())
}
