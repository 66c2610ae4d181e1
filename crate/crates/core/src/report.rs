//! Verdicts of the subordination drivers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this the right-hand side norm makes the ratio meaningless.
pub const SKIP_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub case_id: usize,
    pub test_function: String,
    /// `"2"`, `"inf"`, or `"q=2;p1=2;p2=1"` for two-term inequalities.
    pub p_or_exponents: String,
    pub epsilon: Option<f64>,
    pub lhs_norm: f64,
    pub rhs_norm: f64,
    /// `None` when the case was skipped.
    pub ratio: Option<f64>,
    pub skip_reason: Option<String>,
}

impl CaseRecord {
    /// A case whose ratio is `lhs/rhs`, or skipped if `rhs` is negligible.
    pub fn measured(test_function: &str, p: String, epsilon: Option<f64>, lhs: f64, rhs: f64) -> Self {
        let (ratio, skip_reason) = if rhs < SKIP_THRESHOLD {
            (None, Some(format!("rhs norm {rhs:e} below {SKIP_THRESHOLD:e}")))
        } else {
            (Some(lhs / rhs), None)
        };
        Self {
            case_id: 0,
            test_function: test_function.to_string(),
            p_or_exponents: p,
            epsilon,
            lhs_norm: lhs,
            rhs_norm: rhs,
            ratio,
            skip_reason,
        }
    }

    pub fn skipped(test_function: &str, p: String, epsilon: Option<f64>, reason: String) -> Self {
        Self {
            case_id: 0,
            test_function: test_function.to_string(),
            p_or_exponents: p,
            epsilon,
            lhs_norm: f64::NAN,
            rhs_norm: f64::NAN,
            ratio: None,
            skip_reason: Some(reason),
        }
    }

    pub fn is_skipped(&self) -> bool {
        self.ratio.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubordinationReport {
    pub constant: f64,
    pub tolerance: f64,
    pub per_case: Vec<CaseRecord>,
    pub worst_ratio: f64,
    pub skipped_cases: usize,
    pub passed: bool,
}

impl SubordinationReport {
    /// Numbers the cases in order and applies `worst ≤ constant·(1 + tolerance)`.
    pub fn from_cases(constant: f64, tolerance: f64, mut per_case: Vec<CaseRecord>) -> Result<Self> {
        for (i, c) in per_case.iter_mut().enumerate() {
            c.case_id = i;
        }
        let skipped_cases = per_case.iter().filter(|c| c.is_skipped()).count();
        if skipped_cases == per_case.len() {
            return Err(Error::AllCasesSkipped);
        }
        let worst_ratio = per_case.iter().filter_map(|c| c.ratio).fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            constant,
            tolerance,
            passed: worst_ratio <= constant * (1.0 + tolerance),
            per_case,
            worst_ratio,
            skipped_cases,
        })
    }
}
