//! Finite complex measures on the line: atoms plus an absolutely continuous
//! part sampled on a grid.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{convolve, forward_ft, lp_norm};
use crate::grid::{Exponent, GridSpec, SampledFunction, Side};
use crate::multiplier::Multiplier;
use crate::wiener::{density, limit_at_infinity};

/// Outer fraction of the grid used to fit the `C/x²` tail of a density.
const TAIL_FRACTION: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: f64,
    pub weight: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMeasure {
    atoms: Vec<Atom>,
    density: Option<SampledFunction>,
}

impl FiniteMeasure {
    pub fn new(atoms: Vec<Atom>, density: Option<SampledFunction>) -> Result<Self> {
        for (i, a) in atoms.iter().enumerate() {
            if !a.location.is_finite() || !(a.weight.re.is_finite() && a.weight.im.is_finite()) {
                return Err(Error::InvalidParameter(format!("atom {i} is not finite")));
            }
            if atoms[..i].iter().any(|b| b.location == a.location) {
                return Err(Error::InvalidParameter(format!("duplicate atom at {}", a.location)));
            }
        }
        if let Some(d) = &density {
            d.expect_side(Side::Space)?;
        }
        Ok(Self { atoms, density })
    }

    /// Unit mass at the origin.
    pub fn dirac() -> Self {
        Self {
            atoms: vec![Atom {
                location: 0.0,
                weight: Complex64::new(1.0, 0.0),
            }],
            density: None,
        }
    }

    pub fn from_density(density: SampledFunction) -> Result<Self> {
        Self::new(Vec::new(), Some(density))
    }

    /// The measure `c∞·δ₀ + F⁻¹(ψ - c∞)` whose transform is `ψ`.
    pub fn from_multiplier(psi: &Multiplier, grid: &GridSpec) -> Result<Self> {
        let (c, _) = limit_at_infinity(psi, grid)?;
        let atoms = if c.norm() > 0.0 {
            vec![Atom { location: 0.0, weight: c }]
        } else {
            Vec::new()
        };
        Self::new(atoms, Some(density(psi, c, grid)?))
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&SampledFunction> {
        self.density.as_ref()
    }
}

/// L1 mass of a sampled density plus a `C/x²` tail beyond each end of the
/// window, `C` fitted as the largest `|g(x)|x²` over the outer 10%.
pub fn density_mass_with_tail(g: &SampledFunction) -> f64 {
    let grid = g.grid();
    let n = g.values().len();
    let band = ((n as f64 * TAIL_FRACTION) as usize).max(1);
    let fit = |range: std::ops::Range<usize>| {
        range.fold(0.0_f64, |acc, j| {
            let x = grid.node(j);
            acc.max(g.values()[j].norm() * x * x)
        })
    };
    let left = fit(0..band);
    let right = fit(n - band..n);
    lp_norm(g, Exponent::ONE) + (left + right) / grid.half_length()
}

/// `|μ|(ℝ)`: exact on atoms, tail-corrected on the density.
pub fn total_variation(mu: &FiniteMeasure) -> f64 {
    let atoms: f64 = mu.atoms.iter().map(|a| a.weight.norm()).sum();
    atoms + mu.density.as_ref().map_or(0.0, density_mass_with_tail)
}

/// Samples of `∫e^{-ixy}dμ(x)` on the dual grid.
pub fn measure_ft(mu: &FiniteMeasure, grid: &GridSpec) -> Result<Multiplier> {
    let mut values = match &mu.density {
        Some(d) => {
            d.grid().check_same(grid)?;
            forward_ft(d)?.into_values()
        }
        None => vec![Complex64::new(0.0, 0.0); grid.size()],
    };
    for (k, v) in values.iter_mut().enumerate() {
        let y = grid.dual_node(k);
        for a in &mu.atoms {
            *v += a.weight * Complex64::from_polar(1.0, -a.location * y);
        }
    }
    Multiplier::sampled(SampledFunction::new(*grid, values, Side::Frequency)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftMode {
    /// Shift by the nearest whole number of nodes.
    Snap,
    /// Refuse atoms that are not on a node.
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureConvolution {
    pub function: SampledFunction,
    /// Largest distance between an atom and the node it was snapped to.
    pub snap_error: f64,
    pub wraparound_risk: bool,
}

fn circular_shift(f: &SampledFunction, shift: i64) -> Vec<Complex64> {
    let n = f.values().len() as i64;
    (0..n)
        .map(|j| f.values()[(j - shift).rem_euclid(n) as usize])
        .collect()
}

/// `∫ f(x - t) dμ(t)`.
pub fn convolve_with_measure(f: &SampledFunction, mu: &FiniteMeasure, mode: ShiftMode) -> Result<MeasureConvolution> {
    f.expect_side(Side::Space)?;
    let grid = *f.grid();
    let dx = grid.spacing();
    let mut out = vec![Complex64::new(0.0, 0.0); grid.size()];
    let mut snap_error: f64 = 0.0;
    for a in &mu.atoms {
        let steps = (a.location / dx).round();
        let offset = (a.location - steps * dx).abs();
        if mode == ShiftMode::Exact && offset > 1e-12 * dx.max(a.location.abs()) {
            return Err(Error::AtomOffGrid {
                location: a.location,
                offset,
            });
        }
        snap_error = snap_error.max(offset);
        for (o, v) in out.iter_mut().zip(circular_shift(f, steps as i64)) {
            *o += a.weight * v;
        }
    }
    let mut wraparound_risk = false;
    if let Some(d) = &mu.density {
        let conv = convolve(f, d)?;
        wraparound_risk = conv.wraparound_risk;
        for (o, v) in out.iter_mut().zip(conv.function.values()) {
            *o += v;
        }
    }
    Ok(MeasureConvolution {
        function: SampledFunction::new(grid, out, Side::Space)?,
        snap_error,
        wraparound_risk,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn atomic_total_variation() {
        assert_eq!(total_variation(&FiniteMeasure::dirac()), 1.0);
        let mu = FiniteMeasure::new(
            vec![
                Atom { location: 0.0, weight: c(1.0) },
                Atom { location: 1.0, weight: c(-1.0) },
            ],
            None,
        )
        .unwrap();
        assert_eq!(total_variation(&mu), 2.0);
    }

    #[test]
    fn duplicate_atoms_rejected() {
        let a = Atom { location: 0.5, weight: c(1.0) };
        assert!(FiniteMeasure::new(vec![a, a], None).is_err());
    }

    #[test]
    fn cauchy_density_total_variation() {
        let grid = GridSpec::new(40.0, 8192).unwrap();
        let g = SampledFunction::from_real_fn(grid, Side::Space, |x| 1.0 / (PI * (1.0 + x * x))).unwrap();
        let tv = total_variation(&FiniteMeasure::from_density(g).unwrap());
        assert!((tv - 1.0).abs() <= 1e-3, "{tv}");
    }

    #[test]
    fn transforms() {
        let grid = GridSpec::new(40.0, 8192).unwrap();
        let one = measure_ft(&FiniteMeasure::dirac(), &grid).unwrap();
        assert!(one.sample(&grid).iter().all(|v| *v == c(1.0)));

        let shifted = FiniteMeasure::new(vec![Atom { location: 2.5, weight: c(1.0) }], None).unwrap();
        let m = measure_ft(&shifted, &grid).unwrap();
        for v in m.sample(&grid) {
            assert!((v.norm() - 1.0).abs() < 1e-14);
        }

        let g = SampledFunction::from_real_fn(grid, Side::Space, |x| (-x.abs()).exp()).unwrap();
        let m = measure_ft(&FiniteMeasure::from_density(g).unwrap(), &grid).unwrap();
        for (k, v) in m.sample(&grid).iter().enumerate() {
            let y = grid.dual_node(k);
            if y.abs() <= 10.0 {
                assert!((v - c(2.0 / (1.0 + y * y))).norm() < 1e-3);
            }
        }
    }

    #[test]
    fn convolution_with_atoms() {
        let grid = GridSpec::new(20.0, 1024).unwrap();
        let f = SampledFunction::from_real_fn(grid, Side::Space, |x| (-x * x).exp()).unwrap();
        let id = convolve_with_measure(&f, &FiniteMeasure::dirac(), ShiftMode::Exact).unwrap();
        assert_eq!(id.function, f);

        let shift = 1.25; // 32 nodes
        let mu = FiniteMeasure::new(vec![Atom { location: shift, weight: c(1.0) }], None).unwrap();
        let out = convolve_with_measure(&f, &mu, ShiftMode::Exact).unwrap();
        for (j, v) in out.function.values().iter().enumerate() {
            let x = grid.node(j);
            assert!((v - c((-(x - shift) * (x - shift)).exp())).norm() < 1e-12);
        }

        let off = FiniteMeasure::new(vec![Atom { location: 0.01, weight: c(1.0) }], None).unwrap();
        assert!(matches!(
            convolve_with_measure(&f, &off, ShiftMode::Exact),
            Err(Error::AtomOffGrid { .. })
        ));
        let snapped = convolve_with_measure(&f, &off, ShiftMode::Snap).unwrap();
        assert!(snapped.snap_error <= grid.spacing() / 2.0);
    }

    #[test]
    fn density_part_matches_convolve() {
        let grid = GridSpec::new(20.0, 2048).unwrap();
        let f = SampledFunction::from_real_fn(grid, Side::Space, |x| (-x * x).exp()).unwrap();
        let g = SampledFunction::from_real_fn(grid, Side::Space, |x| (-4.0 * x * x).exp()).unwrap();
        let a = convolve_with_measure(&f, &FiniteMeasure::from_density(g.clone()).unwrap(), ShiftMode::Snap).unwrap();
        assert_eq!(a.function, convolve(&f, &g).unwrap().function);
    }

    #[test]
    fn multiplier_round_trip() {
        let grid = GridSpec::new(40.0, 4096).unwrap();
        let psi = Multiplier::sum(
            Multiplier::constant(1.0),
            crate::multiplier::Registry::Gaussian { rate: 1.0 }.into(),
        );
        let mu = FiniteMeasure::from_multiplier(&psi, &grid).unwrap();
        assert_eq!(mu.atoms().len(), 1);
        let back = measure_ft(&mu, &grid).unwrap();
        for (a, b) in back.sample(&grid).iter().zip(psi.sample(&grid)) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!((total_variation(&mu) - 1.0 - PI.sqrt()).abs() < 1e-6);
    }
}
