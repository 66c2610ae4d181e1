//! Deterministic test-function families with known transforms and smoothness.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, SampledFunction, Side};

/// Smoothness order of families that are differentiable to every order.
pub const SMOOTH: u32 = u32::MAX;
const BOUNDARY_DECAY: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `e^{-ax²}`
    Gaussian { a: f64 },
    /// `e^{-a|x|}`
    ExpAbs { a: f64 },
    /// `exp(1 - 1/(1 - (x/R)²))` on `|x| < R`, peak 1.
    Bump { radius: f64 },
    /// Centered cardinal B-spline of order `m` (support `[-m/2, m/2]`).
    Bspline { order: u32 },
    /// `e^{-ax²} e^{iωx}`
    ModulatedGaussian { a: f64, frequency: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionSpec {
    pub id: String,
    pub family: Family,
    /// Largest `r` with `f, f^{(r)} ∈ L₁`; [`SMOOTH`] for smooth families.
    pub smoothness_order: u32,
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

impl TestFunctionSpec {
    pub fn gaussian(a: f64) -> Self {
        Self {
            id: format!("gaussian({a})"),
            family: Family::Gaussian { a },
            smoothness_order: SMOOTH,
        }
    }

    pub fn exp_abs(a: f64) -> Self {
        Self {
            id: format!("exp_abs({a})"),
            family: Family::ExpAbs { a },
            smoothness_order: 0,
        }
    }

    pub fn bump(radius: f64) -> Self {
        Self {
            id: format!("bump({radius})"),
            family: Family::Bump { radius },
            smoothness_order: SMOOTH,
        }
    }

    pub fn bspline(order: u32) -> Self {
        Self {
            id: format!("bspline({order})"),
            family: Family::Bspline { order },
            smoothness_order: order.saturating_sub(2),
        }
    }

    pub fn modulated_gaussian(a: f64, frequency: f64) -> Self {
        Self {
            id: format!("modulated_gaussian({a},{frequency})"),
            family: Family::ModulatedGaussian { a, frequency },
            smoothness_order: SMOOTH,
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{}: {name} must be positive, got {v}", self.id)))
            }
        };
        match self.family {
            Family::Gaussian { a } | Family::ExpAbs { a } => positive("a", a),
            Family::Bump { radius } => positive("radius", radius),
            Family::Bspline { order } => {
                if (1..=20).contains(&order) {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!("{}: order must lie in 1..=20", self.id)))
                }
            }
            Family::ModulatedGaussian { a, frequency } => {
                positive("a", a)?;
                if frequency.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!("{}: frequency must be finite", self.id)))
                }
            }
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let re = |v: f64| Complex64::new(v, 0.0);
        match self.family {
            Family::Gaussian { a } => re((-a * x * x).exp()),
            Family::ExpAbs { a } => re((-a * x.abs()).exp()),
            Family::Bump { radius } => {
                let t = x / radius;
                if t.abs() >= 1.0 {
                    re(0.0)
                } else {
                    re((1.0 - 1.0 / (1.0 - t * t)).exp())
                }
            }
            Family::Bspline { order } => {
                let m = order;
                let shifted = x + f64::from(m) / 2.0;
                let sum: f64 = (0..=m)
                    .map(|k| {
                        let u = shifted - f64::from(k);
                        if u <= 0.0 {
                            0.0
                        } else {
                            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                            sign * binomial(m, k) * u.powi(m as i32 - 1)
                        }
                    })
                    .sum();
                re(if x.abs() >= f64::from(m) / 2.0 { 0.0 } else { sum / factorial(m - 1) })
            }
            Family::ModulatedGaussian { a, frequency } => Complex64::from_polar((-a * x * x).exp(), frequency * x),
        }
    }

    /// Closed-form `f̂(y)` when available.
    pub fn known_ft(&self, y: f64) -> Option<Complex64> {
        let re = |v: f64| Some(Complex64::new(v, 0.0));
        match self.family {
            Family::Gaussian { a } => re((PI / a).sqrt() * (-y * y / (4.0 * a)).exp()),
            Family::ExpAbs { a } => re(2.0 * a / (a * a + y * y)),
            Family::Bump { .. } => None,
            Family::Bspline { order } => {
                let h = y / 2.0;
                let sinc = if h == 0.0 { 1.0 } else { h.sin() / h };
                re(sinc.powi(order as i32))
            }
            Family::ModulatedGaussian { a, frequency } => {
                let d = y - frequency;
                re((PI / a).sqrt() * (-d * d / (4.0 * a)).exp())
            }
        }
    }

    pub fn has_known_ft(&self) -> bool {
        self.known_ft(0.0).is_some()
    }
}

/// A materialized test function with its id.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    pub id: String,
    pub function: SampledFunction,
}

/// Samples `spec` on the space grid; the grid must contain the function's
/// support up to `1e-10` of its peak.
pub fn materialize(spec: &TestFunctionSpec, grid: &GridSpec) -> Result<SampledFunction> {
    spec.validate()?;
    let f = SampledFunction::from_fn(*grid, Side::Space, |x| spec.eval(x))?;
    let peak = f.max_abs();
    let boundary = spec.eval(-grid.half_length()).norm().max(spec.eval(grid.half_length()).norm());
    if boundary > BOUNDARY_DECAY * peak {
        return Err(Error::GridTooSmall {
            id: spec.id.clone(),
            boundary: boundary / peak,
        });
    }
    Ok(f)
}

pub fn materialize_all(specs: &[TestFunctionSpec], grid: &GridSpec) -> Result<Vec<TestFunction>> {
    specs
        .iter()
        .map(|s| {
            Ok(TestFunction {
                id: s.id.clone(),
                function: materialize(s, grid)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Purpose {
    Means,
    /// Functions with `f^{(r)} ∈ L₁`.
    Diffops(u32),
}

pub fn default_suite(purpose: Purpose) -> Vec<TestFunctionSpec> {
    let all = vec![
        TestFunctionSpec::gaussian(1.0),
        TestFunctionSpec::gaussian(4.0),
        TestFunctionSpec::exp_abs(1.0),
        TestFunctionSpec::bump(2.0),
        TestFunctionSpec::bspline(4),
        TestFunctionSpec::modulated_gaussian(1.0, 3.0),
    ];
    match purpose {
        Purpose::Means => all,
        Purpose::Diffops(r) => all.into_iter().filter(|s| s.smoothness_order >= r).collect(),
    }
}
