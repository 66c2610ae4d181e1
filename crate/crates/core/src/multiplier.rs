//! Fourier multipliers: functions of the frequency variable that can be
//! evaluated anywhere, not only on grid nodes.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, SampledFunction, Side};
use crate::polynomial::Polynomial;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `e^{-|y|^α}`.
pub fn gw_symbol(alpha: f64, y: f64) -> f64 {
    (-y.abs().powf(alpha)).exp()
}

/// `1 - e^{-|y|^α}`, accurate near the origin.
pub fn gw_complement(alpha: f64, y: f64) -> f64 {
    -(-y.abs().powf(alpha)).exp_m1()
}

/// `(1 - e^{-|y|^β}) / (1 - e^{-|y|^α})`, extended by 0 at the origin.
pub fn gw_ratio(alpha: f64, beta: f64, y: f64) -> f64 {
    let den = gw_complement(alpha, y);
    if den == 0.0 {
        return 0.0;
    }
    gw_complement(beta, y) / den
}

pub(crate) fn check_gw_exponent(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {value}")))
    }
}

/// Multipliers with closed forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Registry {
    Constant { value: Complex64 },
    /// `e^{-a|y|}`, the transform of the Cauchy density `a/(π(a²+x²))`.
    ExpAbs { rate: f64 },
    /// `√(π/a) e^{-y²/(4a)}`, the transform of `e^{-ax²}`.
    Gaussian { rate: f64 },
    /// `2a/(a²+y²)`, the transform of `e^{-a|x|}`.
    Lorentzian { rate: f64 },
    GwSymbol { alpha: f64 },
    GwComplement { alpha: f64 },
    GwRatio { alpha: f64, beta: f64 },
}

impl Registry {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Registry::Constant { value } => {
                if value.re.is_finite() && value.im.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter("constant multiplier must be finite".into()))
                }
            }
            Registry::ExpAbs { rate } | Registry::Gaussian { rate } | Registry::Lorentzian { rate } => {
                if rate.is_finite() && rate > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!("rate must be positive, got {rate}")))
                }
            }
            Registry::GwSymbol { alpha } | Registry::GwComplement { alpha } => check_gw_exponent("alpha", alpha),
            Registry::GwRatio { alpha, beta } => {
                check_gw_exponent("alpha", alpha)?;
                check_gw_exponent("beta", beta)
            }
        }
    }

    pub fn eval(&self, y: f64) -> Complex64 {
        match *self {
            Registry::Constant { value } => value,
            Registry::ExpAbs { rate } => re((-rate * y.abs()).exp()),
            Registry::Gaussian { rate } => re((PI / rate).sqrt() * (-y * y / (4.0 * rate)).exp()),
            Registry::Lorentzian { rate } => re(2.0 * rate / (rate * rate + y * y)),
            Registry::GwSymbol { alpha } => re(gw_symbol(alpha, y)),
            Registry::GwComplement { alpha } => re(gw_complement(alpha, y)),
            Registry::GwRatio { alpha, beta } => re(gw_ratio(alpha, beta, y)),
        }
    }

    pub fn limit_at_infinity(&self) -> Complex64 {
        match *self {
            Registry::Constant { value } => value,
            Registry::ExpAbs { .. }
            | Registry::Gaussian { .. }
            | Registry::Lorentzian { .. }
            | Registry::GwSymbol { .. } => re(0.0),
            Registry::GwComplement { .. } | Registry::GwRatio { .. } => re(1.0),
        }
    }

    /// `‖F⁻¹(m - m(∞))‖₁` where it is known in closed form.
    pub fn density_mass(&self) -> Option<f64> {
        match *self {
            Registry::Constant { .. } => Some(0.0),
            Registry::ExpAbs { .. } => Some(1.0),
            Registry::Gaussian { rate } => Some((PI / rate).sqrt()),
            Registry::Lorentzian { rate } => Some(2.0 / rate),
            _ => None,
        }
    }
}

impl fmt::Display for Registry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Registry::Constant { value } => write!(f, "const({value})"),
            Registry::ExpAbs { rate } => write!(f, "exp_abs({rate})"),
            Registry::Gaussian { rate } => write!(f, "gaussian({rate})"),
            Registry::Lorentzian { rate } => write!(f, "lorentzian({rate})"),
            Registry::GwSymbol { alpha } => write!(f, "gw_symbol({alpha})"),
            Registry::GwComplement { alpha } => write!(f, "gw_complement({alpha})"),
            Registry::GwRatio { alpha, beta } => write!(f, "gw_ratio({alpha},{beta})"),
        }
    }
}

/// One piece of a [`Piecewise`] function.
#[derive(Debug, Clone, PartialEq)]
pub enum Piece {
    Zero,
    /// `value_at_start + slope·(y - start)`.
    Linear { start: f64, value_at_start: Complex64, slope: Complex64 },
    Rational { numerator: Polynomial, denominator: Polynomial },
}

impl Piece {
    fn eval(&self, y: f64) -> Complex64 {
        match self {
            Piece::Zero => re(0.0),
            Piece::Linear {
                start,
                value_at_start,
                slope,
            } => value_at_start + slope * (y - start),
            Piece::Rational { numerator, denominator } => numerator.eval(y) / denominator.eval(y),
        }
    }
}

/// A function defined by pieces on consecutive intervals. Piece `i` covers
/// `[breakpoints[i-1], breakpoints[i])`, with the first and last pieces
/// extending to `-∞` and `+∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct Piecewise {
    breakpoints: Vec<f64>,
    pieces: Vec<Piece>,
    limit: Complex64,
}

impl Piecewise {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Piece>, limit: Complex64) -> Result<Self> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidParameter(format!(
                "{} pieces for {} breakpoints",
                pieces.len(),
                breakpoints.len()
            )));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter("breakpoints must increase strictly".into()));
        }
        Ok(Self {
            breakpoints,
            pieces,
            limit,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn eval(&self, y: f64) -> Complex64 {
        let i = self.breakpoints.partition_point(|&b| b <= y);
        self.pieces[i].eval(y)
    }
}

/// Quotient `num/den` with prescribed values where the denominator is below
/// `threshold`; each such point takes the fill whose location is nearest.
#[derive(Debug, Clone, PartialEq)]
pub struct Quotient {
    pub numerator: Box<Multiplier>,
    pub denominator: Box<Multiplier>,
    pub threshold: f64,
    pub fills: Vec<(f64, Complex64)>,
}

impl Quotient {
    fn eval(&self, y: f64) -> Complex64 {
        let d = self.denominator.eval(y);
        if d.norm() > self.threshold {
            return self.numerator.eval(y) / d;
        }
        self.fills
            .iter()
            .min_by(|a, b| (a.0 - y).abs().total_cmp(&(b.0 - y).abs()))
            .map(|f| f.1)
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Multiplier {
    Registry(Registry),
    /// Samples on a dual grid, linearly interpolated and held constant
    /// beyond the window.
    Sampled(SampledFunction),
    Piecewise(Piecewise),
    Sum(Box<Multiplier>, Box<Multiplier>),
    Product(Box<Multiplier>, Box<Multiplier>),
    Scaled(Complex64, Box<Multiplier>),
    Quotient(Quotient),
}

impl From<Registry> for Multiplier {
    fn from(r: Registry) -> Self {
        Multiplier::Registry(r)
    }
}

impl Multiplier {
    pub fn constant(c: f64) -> Self {
        Registry::Constant { value: re(c) }.into()
    }

    pub fn sampled(samples: SampledFunction) -> Result<Self> {
        if samples.side() != Side::Frequency {
            return Err(Error::WrongSide {
                expected: Side::Frequency.name(),
                actual: samples.side().name(),
            });
        }
        Ok(Multiplier::Sampled(samples))
    }

    pub fn sum(a: Multiplier, b: Multiplier) -> Self {
        Multiplier::Sum(Box::new(a), Box::new(b))
    }

    pub fn product(a: Multiplier, b: Multiplier) -> Self {
        Multiplier::Product(Box::new(a), Box::new(b))
    }

    pub fn scaled(c: Complex64, m: Multiplier) -> Self {
        Multiplier::Scaled(c, Box::new(m))
    }

    /// Checks registry parameters throughout the expression.
    pub fn validate(&self) -> Result<()> {
        match self {
            Multiplier::Registry(r) => r.validate(),
            Multiplier::Sampled(_) | Multiplier::Piecewise(_) => Ok(()),
            Multiplier::Sum(a, b) | Multiplier::Product(a, b) => {
                a.validate()?;
                b.validate()
            }
            Multiplier::Scaled(_, m) => m.validate(),
            Multiplier::Quotient(q) => {
                q.numerator.validate()?;
                q.denominator.validate()
            }
        }
    }

    pub fn eval(&self, y: f64) -> Complex64 {
        match self {
            Multiplier::Registry(r) => r.eval(y),
            Multiplier::Sampled(s) => interpolate(s, y),
            Multiplier::Piecewise(p) => p.eval(y),
            Multiplier::Sum(a, b) => a.eval(y) + b.eval(y),
            Multiplier::Product(a, b) => a.eval(y) * b.eval(y),
            Multiplier::Scaled(c, m) => c * m.eval(y),
            Multiplier::Quotient(q) => q.eval(y),
        }
    }

    /// Values on the dual nodes of `grid`.
    pub fn sample(&self, grid: &GridSpec) -> Vec<Complex64> {
        grid.dual_nodes().map(|y| self.eval(y)).collect()
    }

    pub fn sample_function(&self, grid: &GridSpec) -> Result<SampledFunction> {
        SampledFunction::new(*grid, self.sample(grid), Side::Frequency)
    }

    /// The limit at `±∞` when it is known from the construction.
    pub fn known_limit(&self) -> Option<Complex64> {
        match self {
            Multiplier::Registry(r) => Some(r.limit_at_infinity()),
            Multiplier::Sampled(_) => None,
            Multiplier::Piecewise(p) => Some(p.limit),
            Multiplier::Sum(a, b) => Some(a.known_limit()? + b.known_limit()?),
            Multiplier::Product(a, b) => Some(a.known_limit()? * b.known_limit()?),
            Multiplier::Scaled(c, m) => Some(c * m.known_limit()?),
            Multiplier::Quotient(q) => {
                let d = q.denominator.known_limit()?;
                (d.norm() > 0.0).then(|| q.numerator.known_limit().map(|n| n / d)).flatten()
            }
        }
    }

    /// `‖F⁻¹(m - m(∞))‖₁` when known in closed form.
    pub fn known_density_mass(&self) -> Option<f64> {
        match self {
            Multiplier::Registry(r) => r.density_mass(),
            Multiplier::Scaled(c, m) => m.known_density_mass().map(|v| c.norm() * v),
            _ => None,
        }
    }
}

impl fmt::Display for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplier::Registry(r) => write!(f, "{r}"),
            Multiplier::Sampled(s) => write!(f, "sampled[{}]", s.values().len()),
            Multiplier::Piecewise(p) => write!(f, "piecewise[{}]", p.pieces.len()),
            Multiplier::Sum(a, b) => write!(f, "({a} + {b})"),
            Multiplier::Product(a, b) => write!(f, "({a} * {b})"),
            Multiplier::Scaled(c, m) => write!(f, "{c}*{m}"),
            Multiplier::Quotient(q) => write!(f, "({} / {})", q.numerator, q.denominator),
        }
    }
}

fn interpolate(s: &SampledFunction, y: f64) -> Complex64 {
    let grid = s.grid();
    let v = s.values();
    let t = y / grid.dual_spacing() + grid.dual_origin() as f64;
    if t <= 0.0 {
        return v[0];
    }
    let last = v.len() - 1;
    if t >= last as f64 {
        return v[last];
    }
    let k = t.floor() as usize;
    let w = t - k as f64;
    v[k] * (1.0 - w) + v[k + 1] * w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_values() {
        assert_eq!(Registry::ExpAbs { rate: 1.0 }.eval(0.0), re(1.0));
        assert!((Registry::Lorentzian { rate: 2.0 }.eval(2.0).re - 0.5).abs() < 1e-15);
        assert_eq!(Registry::GwRatio { alpha: 1.0, beta: 2.0 }.eval(0.0), re(0.0));
        // Small-y limit of (1-e^{-y²})/(1-e^{-y}) is y.
        let r = Registry::GwRatio { alpha: 1.0, beta: 2.0 }.eval(1e-8).re;
        assert!((r - 1e-8).abs() < 1e-15);
        assert!(Registry::GwSymbol { alpha: 0.0 }.validate().is_err());
        assert!(Registry::Gaussian { rate: -1.0 }.validate().is_err());
    }

    #[test]
    fn complement_is_accurate_near_zero() {
        let v = gw_complement(2.0, 1e-9);
        assert!((v - 1e-18).abs() < 1e-30);
    }

    #[test]
    fn sampled_interpolation_and_clamp() {
        let grid = GridSpec::new(PI, 16).unwrap(); // dual spacing 1
        let s = SampledFunction::from_real_fn(grid, Side::Frequency, |y| y).unwrap();
        let m = Multiplier::sampled(s).unwrap();
        assert!((m.eval(0.25).re - 0.25).abs() < 1e-12);
        assert_eq!(m.eval(100.0).re, 7.0);
        assert_eq!(m.eval(-100.0).re, -8.0);
        assert_eq!(m.known_limit(), None);
    }

    #[test]
    fn piecewise_lookup() {
        let p = Piecewise::new(
            vec![-1.0, 1.0],
            vec![
                Piece::Zero,
                Piece::Linear {
                    start: -1.0,
                    value_at_start: re(0.0),
                    slope: re(1.0),
                },
                Piece::Rational {
                    numerator: Polynomial::from_real(&[1.0]),
                    denominator: Polynomial::from_real(&[0.0, 1.0]),
                },
            ],
            re(0.0),
        )
        .unwrap();
        assert_eq!(p.eval(-2.0), re(0.0));
        assert_eq!(p.eval(0.0), re(1.0));
        assert_eq!(p.eval(4.0), re(0.25));
        assert!(Piecewise::new(vec![1.0, 0.0], vec![Piece::Zero; 3], re(0.0)).is_err());
    }

    #[test]
    fn algebra_limits() {
        let a: Multiplier = Registry::GwComplement { alpha: 1.0 }.into();
        let b = Multiplier::constant(2.0);
        assert_eq!(Multiplier::sum(a.clone(), b.clone()).known_limit(), Some(re(3.0)));
        assert_eq!(Multiplier::product(a.clone(), b.clone()).known_limit(), Some(re(2.0)));
        let q = Multiplier::Quotient(Quotient {
            numerator: Box::new(b),
            denominator: Box::new(a),
            threshold: 1e-12,
            fills: vec![(0.0, re(7.0))],
        });
        assert_eq!(q.known_limit(), Some(re(2.0)));
        assert_eq!(q.eval(0.0), re(7.0));
    }
}
