//! Uniform symmetric grids and sampled functions.
//!
//! A grid covers the half-open window `[-L, L)` with `N` nodes, `N` a power of
//! two. Its dual (frequency) grid has spacing `2π/(NΔ) = π/L` and covers
//! `[-π/Δ, π/Δ)`; frequency node `k` sits at `(k - N/2)·π/L`, so node `N/2`
//! is exactly `y = 0`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_GRID_SIZE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    half_length: f64,
    size: usize,
}

impl GridSpec {
    pub fn new(half_length: f64, size: usize) -> Result<Self> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "grid half-length must be positive and finite, got {half_length}"
            )));
        }
        if size < MIN_GRID_SIZE || !size.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "grid size must be a power of two >= {MIN_GRID_SIZE}, got {size}"
            )));
        }
        Ok(Self { half_length, size })
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Space step `Δ = 2L/N`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_length / self.size as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        -self.half_length + j as f64 * self.spacing()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.size).map(move |j| self.node(j))
    }

    /// Frequency step `π/L`.
    pub fn dual_spacing(&self) -> f64 {
        std::f64::consts::PI / self.half_length
    }

    pub fn dual_node(&self, k: usize) -> f64 {
        (k as f64 - (self.size / 2) as f64) * self.dual_spacing()
    }

    pub fn dual_nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.size).map(move |k| self.dual_node(k))
    }

    /// Upper edge `π/Δ` of the dual window.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI / self.spacing()
    }

    /// The grid with the window and node count both doubled (same `Δ`).
    pub fn widened(&self) -> Self {
        Self {
            half_length: 2.0 * self.half_length,
            size: 2 * self.size,
        }
    }

    /// Index of the dual node at `y = 0`.
    pub fn dual_origin(&self) -> usize {
        self.size / 2
    }

    pub(crate) fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "(L={}, N={}) vs (L={}, N={})",
                self.half_length, self.size, other.half_length, other.size
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Space,
    Frequency,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Space => "space",
            Side::Frequency => "frequency",
        }
    }
}

/// Complex samples on the nodes of a grid (space side) or of its dual.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: GridSpec,
    values: Vec<Complex64>,
    side: Side,
}

impl SampledFunction {
    pub fn new(grid: GridSpec, values: Vec<Complex64>, side: Side) -> Result<Self> {
        if values.len() != grid.size() {
            return Err(Error::GridMismatch(format!(
                "{} samples for a grid of {} nodes",
                values.len(),
                grid.size()
            )));
        }
        if let Some(index) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { grid, values, side })
    }

    /// Samples `f` on the space nodes (or the dual nodes for [`Side::Frequency`]).
    pub fn from_fn(grid: GridSpec, side: Side, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = match side {
            Side::Space => grid.nodes().map(&f).collect(),
            Side::Frequency => grid.dual_nodes().map(&f).collect(),
        };
        Self::new(grid, values, side)
    }

    pub fn from_real_fn(grid: GridSpec, side: Side, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn(grid, side, |x| Complex64::new(f(x), 0.0))
    }

    pub fn zeros(grid: GridSpec, side: Side) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.size()],
            side,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Abscissae matching `values` for this function's side.
    pub fn abscissa(&self, index: usize) -> f64 {
        match self.side {
            Side::Space => self.grid.node(index),
            Side::Frequency => self.grid.dual_node(index),
        }
    }

    pub(crate) fn expect_side(&self, side: Side) -> Result<()> {
        if self.side == side {
            Ok(())
        } else {
            Err(Error::WrongSide {
                expected: side.name(),
                actual: self.side.name(),
            })
        }
    }

    fn zip_with(
        &self,
        other: &SampledFunction,
        op: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<SampledFunction> {
        self.grid.check_same(&other.grid)?;
        if self.side != other.side {
            return Err(Error::WrongSide {
                expected: self.side.name(),
                actual: other.side.name(),
            });
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| op(a, b))
            .collect();
        SampledFunction::new(self.grid, values, self.side)
    }

    pub fn add(&self, other: &SampledFunction) -> Result<SampledFunction> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SampledFunction) -> Result<SampledFunction> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &SampledFunction) -> Result<SampledFunction> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: Complex64) -> SampledFunction {
        SampledFunction {
            grid: self.grid,
            values: self.values.iter().map(|&v| v * c).collect(),
            side: self.side,
        }
    }

    /// Multiplies each sample by `m(abscissa)`.
    pub fn map_with_abscissa(&self, m: impl Fn(f64, Complex64) -> Complex64) -> Result<SampledFunction> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| m(self.abscissa(i), v))
            .collect();
        SampledFunction::new(self.grid, values, self.side)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.norm()))
    }
}

/// Norm index `p ∈ [1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Exponent(f64);

impl Exponent {
    pub const ONE: Exponent = Exponent(1.0);
    pub const TWO: Exponent = Exponent(2.0);
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidParameter(format!("norm index must lie in [1, inf], got {p}")));
        }
        Ok(Exponent(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn reciprocal(self) -> f64 {
        if self.is_infinite() {
            0.0
        } else {
            1.0 / self.0
        }
    }

    pub fn from_reciprocal(r: f64) -> Result<Self> {
        if !(0.0..=1.0 + 1e-15).contains(&r) {
            return Err(Error::InvalidParameter(format!("reciprocal exponent {r} outside [0, 1]")));
        }
        if r <= 0.0 {
            Ok(Exponent::INFINITY)
        } else {
            Exponent::new((1.0 / r).max(1.0))
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl std::str::FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "Inf" | "∞" => Ok(Exponent::INFINITY),
            t => t
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("cannot parse norm index {s:?}")))
                .and_then(Exponent::new),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let parsed = match Raw::deserialize(deserializer)? {
            Raw::Num(p) => Exponent::new(p),
            Raw::Text(s) => s.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}
