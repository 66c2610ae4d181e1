//! Means `M_{α,ε}f = F⁻¹(φ_α(εy) f̂)` generated by `φ_α(y) = e^{-|y|^α}` and
//! the comparison of their approximation errors for two exponents.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::comparison::{comparison_constant, ComparisonSetup, FillPolicy};
use crate::error::{Error, Result};
use crate::fourier::{apply_spectrum, convolve, forward_ft, inverse_raw, lp_norm};
use crate::grid::{Exponent, GridSpec, SampledFunction, Side};
use crate::multiplier::{check_gw_exponent, gw_complement, gw_symbol, Multiplier, Registry};
use crate::report::{CaseRecord, SubordinationReport};
use crate::testkit::TestFunction;
use crate::wiener::WienerEstimate;

const MASS_TOLERANCE: f64 = 1e-3;
/// Closed-form Cauchy kernels are used only if the window holds this much of
/// their mass.
const CAUCHY_TRUNCATION: f64 = 1e-4;
/// Largest admissible `φ_α` at the edge of the dual window.
const EDGE_SYMBOL: f64 = 1e-3;
/// `φ_α(1) = e^{-1}` for every `α`: the kernel's natural width is 1.
const EFFECTIVE_WIDTH: f64 = 1.0;
pub const GW_TOLERANCE: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanResult {
    pub alpha: f64,
    pub epsilon: f64,
    pub p: Exponent,
    pub error: f64,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon.is_finite() && epsilon > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")))
    }
}

/// `ε⁻¹K_α(x/ε)` with `K_α = (2π)⁻¹φ̂_α`, the kernel whose transform is `φ_α(εy)`.
pub fn dilated_kernel(alpha: f64, epsilon: f64, grid: &GridSpec) -> Result<SampledFunction> {
    check_gw_exponent("alpha", alpha)?;
    check_epsilon(epsilon)?;
    let edge = gw_symbol(alpha, epsilon * grid.nyquist());
    if edge > EDGE_SYMBOL {
        return Err(Error::NonConvergent(format!(
            "φ_{alpha}(εy) is {edge:e} at the edge of the dual grid; refine the grid"
        )));
    }
    let l = grid.half_length() / epsilon;
    let kernel = if alpha == 2.0 {
        SampledFunction::from_real_fn(*grid, Side::Space, |x| {
            let t = x / epsilon;
            (-t * t / 4.0).exp() / (2.0 * PI.sqrt() * epsilon)
        })?
    } else if alpha == 1.0 && 1.0 - 2.0 / PI * l.atan() <= CAUCHY_TRUNCATION {
        SampledFunction::from_real_fn(*grid, Side::Space, |x| {
            let t = x / epsilon;
            1.0 / (PI * epsilon * (1.0 + t * t))
        })?
    } else {
        let samples: Vec<Complex64> = grid
            .dual_nodes()
            .map(|y| Complex64::new(gw_symbol(alpha, epsilon * y), 0.0))
            .collect();
        SampledFunction::new(*grid, inverse_raw(grid, samples), Side::Space)?
    };
    let mass = grid.spacing() * kernel.values().iter().map(|v| v.re).sum::<f64>();
    if (mass - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::NonConvergent(format!("kernel mass {mass} differs from 1")));
    }
    Ok(kernel)
}

/// `K_α = (2π)⁻¹φ̂_α` on the space grid.
pub fn gw_kernel(alpha: f64, grid: &GridSpec) -> Result<SampledFunction> {
    dilated_kernel(alpha, 1.0, grid)
}

fn resolvable(epsilon: f64, grid: &GridSpec) -> Result<()> {
    check_epsilon(epsilon)?;
    let minimum = 4.0 * grid.spacing() / EFFECTIVE_WIDTH;
    if epsilon < minimum {
        return Err(Error::KernelUnresolvable { epsilon, minimum });
    }
    Ok(())
}

fn symbol_samples(grid: &GridSpec, m: impl Fn(f64) -> f64) -> Vec<Complex64> {
    grid.dual_nodes().map(|y| Complex64::new(m(y), 0.0)).collect()
}

/// `M_{α,ε}f`, computed on the frequency side.
pub fn gw_mean(f: &SampledFunction, alpha: f64, epsilon: f64) -> Result<SampledFunction> {
    check_gw_exponent("alpha", alpha)?;
    resolvable(epsilon, f.grid())?;
    let f_hat = forward_ft(f)?;
    apply_spectrum(&f_hat, &symbol_samples(f.grid(), |y| gw_symbol(alpha, epsilon * y)))
}

/// `M_{α,ε}f` as a convolution with the dilated kernel.
pub fn gw_mean_space(f: &SampledFunction, alpha: f64, epsilon: f64) -> Result<SampledFunction> {
    check_gw_exponent("alpha", alpha)?;
    resolvable(epsilon, f.grid())?;
    let kernel = dilated_kernel(alpha, epsilon, f.grid())?;
    Ok(convolve(f, &kernel)?.function)
}

fn residual(f_hat: &SampledFunction, alpha: f64, epsilon: f64) -> Result<SampledFunction> {
    apply_spectrum(f_hat, &symbol_samples(f_hat.grid(), |y| gw_complement(alpha, epsilon * y)))
}

/// `‖f - M_{α,ε}f‖_p`, with `f - M f = F⁻¹((1 - φ_α(εy)) f̂)` evaluated
/// without cancellation.
pub fn gw_error(f: &SampledFunction, alpha: f64, epsilon: f64, p: Exponent) -> Result<MeanResult> {
    check_gw_exponent("alpha", alpha)?;
    resolvable(epsilon, f.grid())?;
    let r = residual(&forward_ft(f)?, alpha, epsilon)?;
    Ok(MeanResult {
        alpha,
        epsilon,
        p,
        error: lp_norm(&r, p),
    })
}

fn check_pair(alpha: f64, beta: f64) -> Result<()> {
    check_gw_exponent("alpha", alpha)?;
    check_gw_exponent("beta", beta)?;
    if beta <= alpha {
        return Err(Error::InvalidParameter(format!("need beta > alpha, got alpha={alpha}, beta={beta}")));
    }
    Ok(())
}

/// `ψ = (1 - φ_β)/(1 - φ_α)`, with `ψ(0) = 0`.
pub fn gw_psi(alpha: f64, beta: f64) -> Result<Multiplier> {
    check_pair(alpha, beta)?;
    Ok(Registry::GwRatio { alpha, beta }.into())
}

/// Wiener-norm estimate of `ψ`, as the comparison constant of `1 - φ_β`
/// against `1 - φ_α` with the exact value `ψ(0) = 0` on the zero set.
pub fn gw_constant(alpha: f64, beta: f64, grid: &GridSpec) -> Result<WienerEstimate> {
    check_pair(alpha, beta)?;
    let setup = ComparisonSetup::new(
        Registry::GwComplement { alpha: beta }.into(),
        Registry::GwComplement { alpha }.into(),
    )
    .with_fill(FillPolicy::Explicit(vec![(0.0, Complex64::new(0.0, 0.0))]));
    comparison_constant(&setup, grid)
}

/// Checks `‖f - M_{β,ε}f‖_p ≤ c(α,β)‖f - M_{α,ε}f‖_p` for every test function,
/// `ε` and `p`, with one constant for the whole report.
pub fn gw_verify(
    alpha: f64,
    beta: f64,
    tests: &[TestFunction],
    eps_list: &[f64],
    ps: &[Exponent],
    grid: &GridSpec,
) -> Result<SubordinationReport> {
    check_pair(alpha, beta)?;
    for &eps in eps_list {
        resolvable(eps, grid)?;
    }
    let constant = gw_constant(alpha, beta, grid)?.require_converged()?;
    let per_test: Vec<Vec<CaseRecord>> = tests
        .par_iter()
        .map(|t| {
            let f_hat = forward_ft(&t.function)?;
            let mut cases = Vec::with_capacity(eps_list.len() * ps.len());
            for &eps in eps_list {
                let lhs = residual(&f_hat, beta, eps)?;
                let rhs = residual(&f_hat, alpha, eps)?;
                for &p in ps {
                    cases.push(CaseRecord::measured(&t.id, p.to_string(), Some(eps), lp_norm(&lhs, p), lp_norm(&rhs, p)));
                }
            }
            Ok(cases)
        })
        .collect::<Result<_>>()?;
    SubordinationReport::from_cases(constant.total, GW_TOLERANCE, per_test.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::new(40.0, 16384).unwrap()
    }

    fn gaussian(grid: GridSpec) -> SampledFunction {
        SampledFunction::from_real_fn(grid, Side::Space, |x| (-x * x).exp()).unwrap()
    }

    #[test]
    fn gaussian_kernel() {
        let g = grid();
        let k = gw_kernel(2.0, &g).unwrap();
        for (j, v) in k.values().iter().enumerate() {
            let x = g.node(j);
            let exact = (-x * x / 4.0).exp() / (2.0 * PI.sqrt());
            if exact > 1e-300 {
                assert!((v.re - exact).abs() <= 1e-6 * exact);
            }
        }
    }

    #[test]
    fn cauchy_kernel_on_wide_window() {
        let g = GridSpec::new(8192.0, 1 << 20).unwrap();
        let k = gw_kernel(1.0, &g).unwrap();
        for (j, v) in k.values().iter().enumerate() {
            let x = g.node(j);
            if x.abs() <= 10.0 {
                let exact = 1.0 / (PI * (1.0 + x * x));
                assert!((v.re - exact).abs() <= 1e-5 * exact);
            }
        }
    }

    #[test]
    fn kernel_masses() {
        let g = grid();
        for alpha in [0.5, 1.0, 2.0, 3.0, 4.0] {
            let k = gw_kernel(alpha, &g).unwrap();
            let mass = g.spacing() * k.values().iter().map(|v| v.re).sum::<f64>();
            assert!((mass - 1.0).abs() <= 1e-3, "alpha={alpha}: {mass}");
        }
        // φ_{0.5} is still 1e-2 at the Nyquist frequency of a coarse grid.
        let coarse = GridSpec::new(40.0, 256).unwrap();
        assert!(matches!(gw_kernel(0.5, &coarse), Err(Error::NonConvergent(_))));
    }

    #[test]
    fn gauss_weierstrass_mean_of_gaussian() {
        let g = grid();
        let f = gaussian(g);
        for eps in [1.0, 0.5, 0.1] {
            let m = gw_mean(&f, 2.0, eps).unwrap();
            // e^{-x²} ∗ (Gaussian of variance 2ε²) has variance 1/2 + 2ε².
            let s = 1.0 + 4.0 * eps * eps;
            let mut worst: f64 = 0.0;
            for (j, v) in m.values().iter().enumerate() {
                let x = g.node(j);
                let exact = (-x * x / s).exp() / s.sqrt();
                if exact > 1e-3 {
                    worst = worst.max((v.re - exact).abs() / exact);
                }
            }
            assert!(worst <= 1e-5, "eps={eps}: {worst}");
        }
    }

    #[test]
    fn space_and_frequency_paths_agree() {
        let g = grid();
        let f = gaussian(g);
        for (alpha, eps) in [(2.0, 0.5), (1.0, 0.5), (1.5, 1.0)] {
            let a = gw_mean(&f, alpha, eps).unwrap();
            let b = gw_mean_space(&f, alpha, eps).unwrap();
            let diff = a.sub(&b).unwrap().max_abs();
            assert!(diff <= 1e-6 * a.max_abs(), "alpha={alpha}: {diff}");
        }
    }

    #[test]
    fn constants_are_reproduced() {
        let g = GridSpec::new(40.0, 4096).unwrap();
        let x0 = 35.0;
        // Flat on the interior, smoothly cut off near the edges.
        let f = SampledFunction::from_real_fn(g, Side::Space, |x| if x.abs() < x0 { 1.0 } else { (-(x.abs() - x0).powi(2)).exp() }).unwrap();
        for alpha in [1.0, 2.0] {
            let m = gw_mean(&f, alpha, 0.1).unwrap();
            for (j, v) in m.values().iter().enumerate() {
                if g.node(j).abs() < 10.0 {
                    assert!((v.re - 1.0).abs() <= 1e-3, "alpha={alpha}");
                }
            }
        }
    }

    #[test]
    fn unresolvable_epsilon() {
        let g = grid();
        let f = gaussian(g);
        assert!(matches!(gw_mean(&f, 2.0, 1e-3), Err(Error::KernelUnresolvable { .. })));
        assert!(gw_mean(&f, 2.0, 0.0).is_err());
    }

    #[test]
    fn errors_decrease_with_epsilon() {
        let g = grid();
        let f = gaussian(g);
        for alpha in [1.0, 2.0] {
            let errs: Vec<f64> = [1.0, 0.5, 0.1, 0.05]
                .iter()
                .map(|&e| gw_error(&f, alpha, e, Exponent::TWO).unwrap().error)
                .collect();
            assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
        }
        let zero = SampledFunction::zeros(g, Side::Space);
        assert_eq!(gw_error(&zero, 1.0, 0.5, Exponent::ONE).unwrap().error, 0.0);
    }

    #[test]
    fn small_epsilon_error() {
        let g = GridSpec::new(40.0, 1 << 15).unwrap();
        let f = gaussian(g);
        for p in [Exponent::ONE, Exponent::TWO, Exponent::INFINITY] {
            let e = gw_error(&f, 2.0, 1e-2, p).unwrap().error;
            assert!(e <= 1e-2 * lp_norm(&f, p));
        }
    }

    #[test]
    fn psi_values() {
        let psi = gw_psi(1.0, 2.0).unwrap();
        assert_eq!(psi.eval(0.0).re, 0.0);
        assert_eq!(psi.eval(1.0).re, 1.0);
        let g = grid();
        assert!((psi.eval(g.dual_node(0)).re - 1.0).abs() <= 1e-6);
        assert!(gw_psi(2.0, 1.0).is_err());
        assert!(gw_psi(1.0, 1.0).is_err());
        let bound = 1.0 / (1.0 - (-1.0_f64).exp()) + 1e-9;
        for (alpha, beta) in [(1.0, 2.0), (1.0, 3.0), (2.0, 4.0), (0.5, 1.0)] {
            let psi = gw_psi(alpha, beta).unwrap();
            for y in g.dual_nodes() {
                let v = psi.eval(y).re;
                assert!((0.0..=bound).contains(&v));
                if y.abs() <= 1.0 {
                    assert!(v <= 1.0);
                }
            }
        }
    }

    #[test]
    fn gw_constant_rejects_bad_pair() {
        assert!(matches!(gw_constant(1.0, 1.0, &grid()), Err(Error::InvalidParameter(_))));
    }
}
