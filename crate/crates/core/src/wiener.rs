//! Estimates of the Wiener-algebra norm `|c∞| + ‖F⁻¹(ψ - c∞)‖₁`.
//!
//! The density `g = F⁻¹(ψ - c∞)` is only available through its periodization
//! over the window, so its L1 mass is measured on windows of half-length
//! `L, 2L, ..., 16L` at fixed spacing. Mass gained between successive windows is
//! the tail; when the increments shrink geometrically the remainder of the
//! series is added as well. The estimate is repeated one window up and the two
//! totals must agree.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{inverse_raw, lp_norm_weighted};
use crate::grid::{Exponent, GridSpec, SampledFunction, Side};
use crate::multiplier::Multiplier;

const EDGE_FRACTION: f64 = 0.05;
const LIMIT_CONSISTENCY: f64 = 1e-3;
const GEOMETRIC_MAX: f64 = 0.9;
const HEAVY_TAIL: f64 = 1e-3;
const REFINE_ABS: f64 = 1e-3;
const REFINE_REL: f64 = 1e-2;
const CARLSON_STABILITY: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitSource {
    Analytic,
    EdgeMean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WienerEstimate {
    pub const_at_infinity: Complex64,
    pub limit_source: LimitSource,
    /// L1 mass of the density on the base window.
    pub density_l1: f64,
    /// Mass attributed to the density outside the base window.
    pub tail_bound: f64,
    pub total: f64,
    /// The same estimate computed one window up.
    pub refined_total: f64,
    pub converged: bool,
}

impl WienerEstimate {
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NonConvergent(format!(
                "Wiener norm {} vs {} on the doubled window",
                self.total, self.refined_total
            )))
        }
    }
}

/// `ψ(±∞)`: the analytic value if the multiplier carries one, otherwise the
/// mean over the outer 5% of the dual window on each side.
pub fn limit_at_infinity(psi: &Multiplier, grid: &GridSpec) -> Result<(Complex64, LimitSource)> {
    if let Some(c) = psi.known_limit() {
        return Ok((c, LimitSource::Analytic));
    }
    let samples = psi.sample(grid);
    let n = samples.len();
    let band = ((n as f64 * EDGE_FRACTION) as usize).max(1);
    let left = samples[..band].iter().sum::<Complex64>() / band as f64;
    let right = samples[n - band..].iter().sum::<Complex64>() / band as f64;
    let c = (left + right) / 2.0;
    if (left - right).norm() > LIMIT_CONSISTENCY * (1.0 + c.norm()) {
        return Err(Error::InconsistentLimit {
            left: left.to_string(),
            right: right.to_string(),
        });
    }
    Ok((c, LimitSource::EdgeMean))
}

fn centered_samples(psi: &Multiplier, c: Complex64, grid: &GridSpec) -> Vec<Complex64> {
    grid.dual_nodes().map(|y| psi.eval(y) - c).collect()
}

/// `F⁻¹(ψ - c)` on the space grid.
pub fn density(psi: &Multiplier, c: Complex64, grid: &GridSpec) -> Result<SampledFunction> {
    let values = inverse_raw(grid, centered_samples(psi, c, grid));
    SampledFunction::new(*grid, values, Side::Space)
}

fn periodized_mass(psi: &Multiplier, c: Complex64, grid: &GridSpec) -> Result<f64> {
    let values = inverse_raw(grid, centered_samples(psi, c, grid));
    if let Some(index) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonFinite { index });
    }
    Ok(lp_norm_weighted(&values, grid.spacing(), Exponent::ONE))
}

/// `(tail, heavy)` from three window masses.
fn tail_from(v: &[f64]) -> (f64, bool) {
    let d1 = v[1] - v[0];
    let d2 = v[2] - v[1];
    let mut tail = d1.max(0.0) + d2.max(0.0);
    let mut heavy = false;
    if d1 > 0.0 && d2 > 0.0 {
        let r = d2 / d1;
        if r < GEOMETRIC_MAX {
            tail += d2 * r / (1.0 - r);
        } else if d2 > HEAVY_TAIL * v[2].max(1e-300) {
            heavy = true;
        }
    }
    (tail, heavy)
}

/// Wiener-norm estimate of `ψ` with the base window of `grid`.
///
/// Returns `converged = false` rather than an error when the refined estimate
/// disagrees; callers decide whether that is fatal.
pub fn wiener_norm_estimate(psi: &Multiplier, grid: &GridSpec) -> Result<WienerEstimate> {
    psi.validate()?;
    let (c, limit_source) = limit_at_infinity(psi, grid)?;
    let mut levels = Vec::with_capacity(5);
    let mut g = *grid;
    for _ in 0..5 {
        levels.push(periodized_mass(psi, c, &g)?);
        g = g.widened();
    }
    // Folded oscillating tails can make one difference grow; only a
    // non-geometric pattern seen on two consecutive triples counts as heavy.
    let (tail0, h0) = tail_from(&levels[0..3]);
    let (tail1, h1) = tail_from(&levels[1..4]);
    let (_, h2) = tail_from(&levels[2..5]);
    let (heavy0, heavy1) = (h0 && h1, h1 && h2);
    let total = c.norm() + levels[0] + tail0;
    let refined_total = c.norm() + levels[1] + tail1;
    let converged =
        !heavy0 && !heavy1 && (total - refined_total).abs() <= REFINE_ABS.max(REFINE_REL * total);
    Ok(WienerEstimate {
        const_at_infinity: c,
        limit_source,
        density_l1: levels[0],
        tail_bound: tail0,
        total,
        refined_total,
        converged,
    })
}

fn carlson_on(psi: &Multiplier, c: Complex64, grid: &GridSpec) -> f64 {
    let s = centered_samples(psi, c, grid);
    let dy = grid.dual_spacing();
    let n = s.len();
    let l2 = dy * s.iter().map(|v| v.norm_sqr()).sum::<f64>();
    let d2 = dy
        * (0..n)
            .map(|k| {
                let d = if k == 0 {
                    (s[1] - s[0]) / dy
                } else if k == n - 1 {
                    (s[n - 1] - s[n - 2]) / dy
                } else {
                    (s[k + 1] - s[k - 1]) / (2.0 * dy)
                };
                d.norm_sqr()
            })
            .sum::<f64>();
    std::f64::consts::PI * std::f64::consts::SQRT_2 * (l2 + d2).sqrt()
}

/// `|c∞| + π√2 · (‖ψ - c∞‖₂² + ‖ψ'‖₂²)^{1/2}`, an upper bound for the Wiener
/// norm (the second term bounds the density's L1 mass). Not applicable when the two norms are not stable under refinement
/// (for instance when `ψ'` is not square integrable).
pub fn carlson_sufficient_bound(psi: &Multiplier, grid: &GridSpec) -> Result<f64> {
    psi.validate()?;
    let (c, _) = limit_at_infinity(psi, grid)?;
    let coarse = carlson_on(psi, c, grid);
    let fine = carlson_on(psi, c, &grid.widened());
    if !(coarse.is_finite() && fine.is_finite()) {
        return Err(Error::NotApplicable("Sobolev norms are not finite".into()));
    }
    if (coarse - fine).abs() > CARLSON_STABILITY * coarse.max(fine) {
        return Err(Error::NotApplicable(format!(
            "Sobolev norms unstable under refinement ({coarse} vs {fine})"
        )));
    }
    Ok(c.norm() + coarse)
}
