//! Discrete realisation of the continuous Fourier pair
//!
//! ```text
//! f̂(y) = ∫ f(x) e^{-ixy} dx,        f(x) = (2π)⁻¹ ∫ f̂(y) e^{ixy} dy
//! ```
//!
//! on a [`GridSpec`]. With `x_j = -L + jΔ` and `y_k = (k - N/2)π/L` the phase
//! `e^{-i x_j y_k}` factors into `(-1)^j (-1)^k e^{-2πijk/N}`, so both
//! directions are a plain FFT sandwiched between sign flips. Quadrature is the
//! rectangle rule, which makes the convolution theorem exact in the discrete
//! model.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grid::{Exponent, GridSpec, SampledFunction, Side};

/// Fraction of nodes on each side inspected by the wraparound check.
const WRAP_FRACTION: f64 = 0.10;
const WRAP_DECAY: f64 = 1e-8;

fn alternate(values: &mut [Complex64]) {
    for v in values.iter_mut().skip(1).step_by(2) {
        *v = -*v;
    }
}

fn fft_in_place(values: &mut [Complex64], forward: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let plan = if forward {
        planner.plan_fft_forward(values.len())
    } else {
        planner.plan_fft_inverse(values.len())
    };
    plan.process(values);
}

/// Forward transform of raw space samples on `grid`.
pub(crate) fn forward_raw(grid: &GridSpec, mut values: Vec<Complex64>) -> Vec<Complex64> {
    alternate(&mut values);
    fft_in_place(&mut values, true);
    alternate(&mut values);
    let dx = grid.spacing();
    values.iter_mut().for_each(|v| *v *= dx);
    values
}

/// Inverse transform of raw dual-grid samples on `grid`.
pub(crate) fn inverse_raw(grid: &GridSpec, mut values: Vec<Complex64>) -> Vec<Complex64> {
    alternate(&mut values);
    fft_in_place(&mut values, false);
    alternate(&mut values);
    let scale = 1.0 / (grid.size() as f64 * grid.spacing());
    values.iter_mut().for_each(|v| *v *= scale);
    values
}

/// Samples of `f̂` on the dual grid.
pub fn forward_ft(f: &SampledFunction) -> Result<SampledFunction> {
    f.expect_side(Side::Space)?;
    let values = forward_raw(f.grid(), f.values().to_vec());
    SampledFunction::new(*f.grid(), values, Side::Frequency)
}

/// Samples of `(2π)⁻¹∫F(y)e^{ixy}dy` on the space grid.
pub fn inverse_ft(spectrum: &SampledFunction) -> Result<SampledFunction> {
    spectrum.expect_side(Side::Frequency)?;
    let values = inverse_raw(spectrum.grid(), spectrum.values().to_vec());
    SampledFunction::new(*spectrum.grid(), values, Side::Space)
}

/// `(Δ Σ|f|^p)^{1/p}`, or `max |f|` for `p = ∞`. On the frequency side the
/// weight is the dual spacing.
pub fn lp_norm(f: &SampledFunction, p: Exponent) -> f64 {
    let weight = match f.side() {
        Side::Space => f.grid().spacing(),
        Side::Frequency => f.grid().dual_spacing(),
    };
    lp_norm_weighted(f.values(), weight, p)
}

pub(crate) fn lp_norm_weighted(values: &[Complex64], weight: f64, p: Exponent) -> f64 {
    if p.is_infinite() {
        return values.iter().fold(0.0, |acc, v| acc.max(v.norm()));
    }
    let p = p.value();
    if p == 1.0 {
        return weight * values.iter().fold(0.0, |acc, v| acc + v.norm());
    }
    if p == 2.0 {
        return (weight * values.iter().fold(0.0, |acc, v| acc + v.norm_sqr())).sqrt();
    }
    // Scale by the max to keep |v|^p in range for large p.
    let peak = values.iter().fold(0.0, |acc: f64, v| acc.max(v.norm()));
    if peak == 0.0 {
        return 0.0;
    }
    let sum = values.iter().fold(0.0, |acc, v| acc + (v.norm() / peak).powf(p));
    peak * (weight * sum).powf(1.0 / p)
}

/// Convenience wrapper validating `p`.
pub fn lp_norm_checked(f: &SampledFunction, p: f64) -> Result<f64> {
    Ok(lp_norm(f, Exponent::new(p)?))
}

/// Whether `f` decays to `1e-8` of its peak over the outer 10% of the grid.
pub fn decays_at_edges(f: &SampledFunction) -> bool {
    let n = f.values().len();
    let band = ((n as f64 * WRAP_FRACTION) as usize).max(1);
    let peak = f.max_abs();
    if peak == 0.0 {
        return true;
    }
    let edge = f.values()[..band]
        .iter()
        .chain(&f.values()[n - band..])
        .fold(0.0, |acc: f64, v| acc.max(v.norm()));
    edge <= WRAP_DECAY * peak
}

/// Output of [`convolve`].
#[derive(Debug, Clone, PartialEq)]
pub struct Convolution {
    pub function: SampledFunction,
    /// Set when an input does not decay near the grid edges, so the circular
    /// convolution may differ from the one on the line.
    pub wraparound_risk: bool,
}

/// `(f∗g)(x) = ∫ f(x-t) g(t) dt`, realised as a Δ-scaled circular convolution.
pub fn convolve(f: &SampledFunction, g: &SampledFunction) -> Result<Convolution> {
    f.expect_side(Side::Space)?;
    g.expect_side(Side::Space)?;
    f.grid().check_same(g.grid())?;
    let wraparound_risk = !(decays_at_edges(f) && decays_at_edges(g));
    let product = forward_ft(f)?.mul(&forward_ft(g)?)?;
    Ok(Convolution {
        function: inverse_ft(&product)?,
        wraparound_risk,
    })
}

/// `inverse_ft(m · forward_ft(f))` for a pointwise multiplier given by its
/// samples on the dual grid.
pub(crate) fn apply_spectrum(f_hat: &SampledFunction, symbol: &[Complex64]) -> Result<SampledFunction> {
    f_hat.expect_side(Side::Frequency)?;
    if symbol.len() != f_hat.values().len() {
        return Err(Error::GridMismatch("symbol length differs from spectrum".into()));
    }
    let values: Vec<Complex64> = f_hat.values().iter().zip(symbol).map(|(a, b)| a * b).collect();
    SampledFunction::new(*f_hat.grid(), inverse_raw(f_hat.grid(), values), Side::Space)
}
