//! Complex polynomials of a real variable and their real roots.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_CLUSTER_TOLERANCE: f64 = 1e-7;
const ROOT_RESIDUAL: f64 = 1e-8;

/// Coefficients in ascending order; trailing zeros are trimmed, so the zero
/// polynomial has no coefficients and no degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<Complex64>", from = "Vec<Complex64>")]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl From<Vec<Complex64>> for Polynomial {
    fn from(coeffs: Vec<Complex64>) -> Self {
        Polynomial::new(coeffs)
    }
}

impl From<Polynomial> for Vec<Complex64> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::from_real(&[0.0, 1.0])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<Complex64> {
        self.coeffs.last().copied()
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `Σ |c_k| |x|^k`, the natural magnitude against which `|P(x)|` is small.
    pub fn magnitude_at(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x.abs() + c.norm())
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        Polynomial::new(
            (0..n)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or(zero) + other.coeffs.get(k).copied().unwrap_or(zero)
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::new(Vec::new());
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    /// Synthetic division by `(x - root)`: returns the quotient and the remainder `P(root)`.
    pub fn deflate(&self, root: f64) -> (Polynomial, Complex64) {
        if self.coeffs.len() <= 1 {
            return (Polynomial::new(Vec::new()), self.coeffs.first().copied().unwrap_or_default());
        }
        let n = self.coeffs.len();
        let mut quotient = vec![Complex64::new(0.0, 0.0); n - 1];
        let mut carry = self.coeffs[n - 1];
        for k in (0..n - 1).rev() {
            quotient[k] = carry;
            carry = self.coeffs[k] + carry * root;
        }
        (Polynomial::new(quotient), carry)
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Coefficients of `P(x + c)`, i.e. the Taylor coefficients of `P` at `c`.
    pub fn taylor_at(&self, c: Complex64) -> Vec<Complex64> {
        let mut work = self.coeffs.clone();
        let n = work.len();
        for k in 0..n {
            for j in (k..n - 1).rev() {
                let next = work[j + 1];
                work[j] += c * next;
            }
        }
        work
    }

    /// All complex roots with multiplicity, by Aberth-Ehrlich iteration.
    /// Multiple roots come back as tight clusters.
    pub fn roots(&self) -> Vec<Complex64> {
        let zeros = self.coeffs.iter().take_while(|c| c.norm() == 0.0).count();
        let mut out = vec![Complex64::new(0.0, 0.0); zeros];
        let rest = Polynomial::new(self.coeffs[zeros.min(self.coeffs.len())..].to_vec());
        out.extend(aberth(&rest));
        out
    }
}

const ABERTH_MAX_ITER: usize = 500;

fn aberth(p: &Polynomial) -> Vec<Complex64> {
    let n = match p.degree() {
        Some(n) if n >= 1 => n,
        _ => return Vec::new(),
    };
    let c = p.coeffs();
    if n == 1 {
        return vec![-c[0] / c[1]];
    }
    let dp = p.derivative();
    let radius = (c[0].norm() / c[n].norm()).powf(1.0 / n as f64);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..ABERTH_MAX_ITER {
        let mut settled = true;
        for i in 0..n {
            let pz = p.eval_complex(z[i]);
            if pz.norm() == 0.0 {
                continue;
            }
            let repulsion: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let dpz = dp.eval_complex(z[i]);
            let step = if dpz.norm() == 0.0 {
                -repulsion.inv()
            } else {
                let newton = pz / dpz;
                newton / (Complex64::new(1.0, 0.0) - newton * repulsion)
            };
            if !(step.re.is_finite() && step.im.is_finite()) {
                let bump = Complex64::new(1e-8, 1e-8) * (1.0 + z[i].norm());
                z[i] += bump;
                settled = false;
                continue;
            }
            z[i] -= step;
            if step.norm() > 4.0 * f64::EPSILON * (1.0 + z[i].norm()) {
                settled = false;
            }
        }
        if settled {
            break;
        }
    }
    z
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coeff = if c.im == 0.0 { format!("{}", c.re) } else { format!("({}{:+}i)", c.re, c.im) };
            match k {
                0 => write!(f, "{coeff}")?,
                1 => write!(f, "{coeff}x")?,
                _ => write!(f, "{coeff}x^{k}")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealRoot {
    pub location: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub roots: Vec<RealRoot>,
    pub cluster_tolerance: f64,
}

impl RootSet {
    pub fn locations(&self) -> impl Iterator<Item = f64> + '_ {
        self.roots.iter().map(|r| r.location)
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// The root of this set matching `x`, if any lies within the tolerance.
    pub fn find(&self, x: f64) -> Option<RealRoot> {
        let tol = 10.0 * self.cluster_tolerance;
        self.roots
            .iter()
            .copied()
            .find(|r| (r.location - x).abs() <= tol * (1.0 + x.abs()))
    }
}

/// Relative radius within which root approximations are tested as one
/// multiple root.
const CANDIDATE_RADIUS: f64 = 1e-3;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn single_linkage(points: &[Complex64], radius: f64) -> Vec<Vec<Complex64>> {
    let mut label: Vec<usize> = (0..points.len()).collect();
    for i in 0..points.len() {
        for j in 0..i {
            let (a, b) = (points[i], points[j]);
            if (a - b).norm() <= radius * (1.0 + a.norm().max(b.norm())) && label[i] != label[j] {
                let (from, to) = (label[i], label[j]);
                label.iter_mut().filter(|l| **l == from).for_each(|l| *l = to);
            }
        }
    }
    let mut ids = label.clone();
    ids.sort_unstable();
    ids.dedup();
    ids.into_iter()
        .map(|id| points.iter().zip(&label).filter(|(_, &l)| l == id).map(|(z, _)| *z).collect())
        .collect()
}

/// Tests whether `members` approximate one root of multiplicity `m = len`:
/// the centroid is polished by Newton on `P^{(m-1)}` and the Taylor
/// coefficients of orders below `m` must vanish to the expected order.
fn verify_cluster(p: &Polynomial, members: &[Complex64], tol: f64) -> Option<Complex64> {
    let m = members.len();
    let mut c = members.iter().sum::<Complex64>() / m as f64;
    let spread = members.iter().fold(0.0_f64, |acc, z| acc.max((z - c).norm()));
    let mut q = p.clone();
    for _ in 1..m {
        q = q.derivative();
    }
    let dq = q.derivative();
    for _ in 0..20 {
        let d = dq.eval_complex(c);
        if d.norm() == 0.0 {
            break;
        }
        let step = q.eval_complex(c) / d;
        if !(step.norm() <= spread.max(tol * (1.0 + c.norm()))) {
            break;
        }
        c -= step;
        if step.norm() <= f64::EPSILON * (1.0 + c.norm()) {
            break;
        }
    }
    let b = p.taylor_at(c);
    let abs_poly = Polynomial::new(p.coeffs().iter().map(|a| Complex64::new(a.norm(), 0.0)).collect());
    let magnitude = abs_poly.taylor_at(Complex64::new(c.norm(), 0.0));
    let bm = b.get(m).map_or(0.0, |v| v.norm());
    let h = tol * (1.0 + c.norm());
    let ok = (0..m).all(|k| {
        let allowed = bm * binomial(m, k) * h.powi((m - k) as i32) + 64.0 * f64::EPSILON * magnitude[k].norm();
        b[k].norm() <= allowed
    });
    ok.then_some(c)
}

fn resolve(p: &Polynomial, group: Vec<Complex64>, tol: f64, out: &mut Vec<(Complex64, usize)>) {
    if let Some(c) = verify_cluster(p, &group, tol) {
        out.push((c, group.len()));
        return;
    }
    let sub = single_linkage(&group, tol);
    if sub.len() == 1 {
        // Not resolvable as one root: report the members individually.
        out.extend(group.into_iter().map(|z| (z, 1)));
        return;
    }
    for g in sub {
        if let Some(c) = verify_cluster(p, &g, tol) {
            out.push((c, g.len()));
        } else {
            out.extend(g.into_iter().map(|z| (z, 1)));
        }
    }
}

/// Real roots of `p` with multiplicities.
///
/// Root approximations within a relative `1e-3` are tested as a single
/// multiple root; a (possibly multiple) root is real when its imaginary part
/// is below `cluster_tolerance·(1 + |x|)`, and real roots closer than the
/// same tolerance are merged with summed multiplicity.
pub fn real_roots(p: &Polynomial, cluster_tolerance: f64) -> Result<RootSet> {
    if !(cluster_tolerance > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "cluster tolerance must be positive, got {cluster_tolerance}"
        )));
    }
    let zeros = p.coeffs().iter().take_while(|c| c.norm() == 0.0).count();
    let reduced = Polynomial::new(p.coeffs()[zeros.min(p.coeffs().len())..].to_vec());
    let mut resolved = Vec::new();
    if zeros > 0 && !p.is_zero() {
        resolved.push((Complex64::new(0.0, 0.0), zeros));
    }
    for group in single_linkage(&aberth(&reduced), CANDIDATE_RADIUS) {
        resolve(&reduced, group, cluster_tolerance, &mut resolved);
    }

    let mut roots: Vec<RealRoot> = Vec::new();
    for (z, multiplicity) in resolved {
        if z.im.abs() > cluster_tolerance * (1.0 + z.re.abs()) {
            continue;
        }
        let location = z.re;
        let residual = p.eval(location).norm();
        let scale = p.magnitude_at(location).max(1.0);
        if residual > ROOT_RESIDUAL * scale {
            return Err(Error::RootVerification {
                root: format!("{location}"),
                residual,
            });
        }
        roots.push(RealRoot { location, multiplicity });
    }
    roots.sort_by(|a, b| a.location.total_cmp(&b.location));
    let mut merged: Vec<RealRoot> = Vec::new();
    for r in roots {
        match merged.last_mut() {
            Some(last) if (r.location - last.location).abs() <= cluster_tolerance * (1.0 + r.location.abs()) => {
                let total = (last.multiplicity + r.multiplicity) as f64;
                last.location = (last.location * last.multiplicity as f64 + r.location * r.multiplicity as f64) / total;
                last.multiplicity += r.multiplicity;
            }
            _ => merged.push(r),
        }
    }
    Ok(RootSet {
        roots: merged,
        cluster_tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_root_at_origin() {
        let set = real_roots(&Polynomial::from_real(&[0.0, 0.0, 1.0]), DEFAULT_CLUSTER_TOLERANCE).unwrap();
        assert_eq!(set.roots, vec![RealRoot { location: 0.0, multiplicity: 2 }]);
    }

    #[test]
    fn no_real_roots() {
        let set = real_roots(&Polynomial::from_real(&[1.0, 0.0, 1.0]), DEFAULT_CLUSTER_TOLERANCE).unwrap();
        assert!(set.is_empty());
    }

    #[test]
    fn mixed_real_and_complex() {
        // (x-1)(x-2)(x²+4)
        assert!(Polynomial::x().mul(&Polynomial::new(Vec::new())).is_zero());
        let factors = [
            Polynomial::from_real(&[-1.0, 1.0]),
            Polynomial::from_real(&[-2.0, 1.0]),
            Polynomial::from_real(&[4.0, 0.0, 1.0]),
        ];
        let p = factors.iter().fold(Polynomial::from_real(&[1.0]), |acc, f| acc.mul(f));
        // Oracle: direct expansion x⁴ - 3x³ + 6x² - 12x + 8.
        assert_eq!(p, Polynomial::from_real(&[8.0, -12.0, 6.0, -3.0, 1.0]));
        for x in [1.0, 2.0] {
            assert_eq!(p.eval(x).norm(), 0.0);
        }
        let set = real_roots(&p, DEFAULT_CLUSTER_TOLERANCE).unwrap();
        assert_eq!(set.roots.len(), 2);
        assert!((set.roots[0].location - 1.0).abs() < 1e-10);
        assert!((set.roots[1].location - 2.0).abs() < 1e-10);
        assert!(set.roots.iter().all(|r| r.multiplicity == 1));
    }

    #[test]
    fn squared_quadratic_has_double_roots() {
        let q = Polynomial::from_real(&[-1.0, 0.0, 1.0]);
        let set = real_roots(&q.mul(&q), DEFAULT_CLUSTER_TOLERANCE).unwrap();
        assert_eq!(set.roots.len(), 2);
        for (r, want) in set.roots.iter().zip([-1.0, 1.0]) {
            assert!((r.location - want).abs() < 1e-7);
            assert_eq!(r.multiplicity, 2);
        }
    }

    #[test]
    fn constant_has_no_roots() {
        let set = real_roots(&Polynomial::from_real(&[3.0]), DEFAULT_CLUSTER_TOLERANCE).unwrap();
        assert!(set.is_empty());
        assert_eq!(Polynomial::from_real(&[0.0, 0.0]).degree(), None);
    }

    #[test]
    fn deflation_removes_a_root() {
        let p = Polynomial::from_real(&[0.0, 1.0, 0.0, -1.0]); // x - x³
        let (q, rem) = p.deflate(0.0);
        assert_eq!(rem.norm(), 0.0);
        assert_eq!(q, Polynomial::from_real(&[1.0, 0.0, -1.0]));
        let (_, rem) = p.deflate(2.0);
        assert_eq!(rem, p.eval(2.0));
    }

    #[test]
    fn higher_multiplicities() {
        // (x-1)³(x+2)
        let p = Polynomial::from_real(&[-1.0, 1.0])
            .mul(&Polynomial::from_real(&[-1.0, 1.0]))
            .mul(&Polynomial::from_real(&[-1.0, 1.0]))
            .mul(&Polynomial::from_real(&[2.0, 1.0]));
        let set = real_roots(&p, DEFAULT_CLUSTER_TOLERANCE).unwrap();
        assert_eq!(set.roots.len(), 2);
        assert!((set.roots[0].location + 2.0).abs() < 1e-12);
        assert_eq!(set.roots[0].multiplicity, 1);
        assert!((set.roots[1].location - 1.0).abs() < 1e-9);
        assert_eq!(set.roots[1].multiplicity, 3);

        // (x²-1)³
        let q = Polynomial::from_real(&[-1.0, 0.0, 1.0]);
        let set = real_roots(&q.mul(&q).mul(&q), DEFAULT_CLUSTER_TOLERANCE).unwrap();
        assert_eq!(set.roots.iter().map(|r| r.multiplicity).collect::<Vec<_>>(), vec![3, 3]);
    }

    #[test]
    fn close_distinct_roots_stay_distinct() {
        let p = Polynomial::from_real(&[-1.0, 1.0]).mul(&Polynomial::from_real(&[-1.0001, 1.0]));
        let set = real_roots(&p, DEFAULT_CLUSTER_TOLERANCE).unwrap();
        assert_eq!(set.roots.len(), 2);
        assert!(set.roots.iter().all(|r| r.multiplicity == 1));
    }

    #[test]
    fn complex_coefficients() {
        // (x - 1)(x - i): one real root.
        let p = Polynomial::from_real(&[-1.0, 1.0]).mul(&Polynomial::new(vec![Complex64::new(0.0, -1.0), Complex64::new(1.0, 0.0)]));
        let set = real_roots(&p, DEFAULT_CLUSTER_TOLERANCE).unwrap();
        assert_eq!(set.roots.len(), 1);
        assert!((set.roots[0].location - 1.0).abs() < 1e-12);
    }

    #[test]
    fn taylor_shift() {
        // x² at c = 1 is 1 + 2t + t².
        let b = Polynomial::from_real(&[0.0, 0.0, 1.0]).taylor_at(Complex64::new(1.0, 0.0));
        assert_eq!(b, vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0), Complex64::new(1.0, 0.0)]);
    }

    #[test]
    fn display() {
        assert_eq!(Polynomial::from_real(&[1.0, 0.0, -2.0]).to_string(), "-2x^2 + 1");
        assert_eq!(Polynomial::new(vec![]).to_string(), "0");
    }
}
