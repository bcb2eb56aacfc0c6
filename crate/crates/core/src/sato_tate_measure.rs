//! The p-adic Plancherel measures `mu_p` on `[-2, 2]`, the Sato-Tate limit `mu_inf`,
//! their products over several primes, and Weyl limits.
//!
//! Conventions: an eigenvalue `a = 2 cos(theta)` with `theta in [0, pi]`, and the
//! normalized angle `x = theta / (2 pi) in [0, 1/2]`.
//!
//! ```text
//! mu_p   = (p+1)/pi * sqrt(1 - x^2/4) / ((p^{1/2} + p^{-1/2})^2 - x^2) dx
//! mu_inf = 1/(2 pi) * sqrt(4 - x^2) dx
//! ```
//!
//! Interval masses are computed by adaptive Simpson quadrature in `theta`, where the
//! integrand is smooth up to the endpoints.

use std::f64::consts::PI;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_arith::{big_pow, rat_int, validate_primes, Rat};

const QUAD_TOL: f64 = 1e-12;
const MAX_INTERVALS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MeasureSpec {
    Prime(u64),
    /// The Sato-Tate measure, the `p -> infinity` limit.
    Infinity,
}

impl MeasureSpec {
    pub fn prime(p: u64) -> Result<Self> {
        validate_primes(&[p])?;
        Ok(MeasureSpec::Prime(p))
    }
}

/// Density of the measure at `x in [-2, 2]`.
pub fn density(spec: MeasureSpec, x: f64) -> Result<f64> {
    if !(-2.0..=2.0).contains(&x) {
        return Err(Error::OutOfDomain(x));
    }
    Ok(density_unchecked(spec, x))
}

fn density_unchecked(spec: MeasureSpec, x: f64) -> f64 {
    let root = (1.0 - x * x / 4.0).max(0.0).sqrt();
    match spec {
        MeasureSpec::Infinity => root / PI,
        MeasureSpec::Prime(p) => {
            let p = p as f64;
            let s = p.sqrt() + 1.0 / p.sqrt();
            (p + 1.0) / PI * root / (s * s - x * x)
        }
    }
}

/// Density in `theta` after the substitution `x = 2 cos(theta)`.
pub fn angle_density(spec: MeasureSpec, theta: f64) -> f64 {
    let s = theta.sin();
    match spec {
        MeasureSpec::Infinity => 2.0 / PI * s * s,
        MeasureSpec::Prime(p) => {
            let p = p as f64;
            let c = theta.cos();
            let q = p.sqrt() + 1.0 / p.sqrt();
            2.0 * (p + 1.0) / PI * s * s / (q * q - 4.0 * c * c)
        }
    }
}

/// Density of the normalized angle `x = theta / (2 pi)` on `[0, 1/2]`:
/// `4(p+1) sin^2(2 pi x) / ((p^{1/2} + p^{-1/2})^2 - 4 cos^2(2 pi x))`.
pub fn normalized_angle_density(p: u64, x: f64) -> f64 {
    2.0 * PI * angle_density(MeasureSpec::Prime(p), 2.0 * PI * x)
}

/// Sup norm of [`normalized_angle_density`], attained at `x = 1/4`.
pub fn normalized_angle_sup(p: u64) -> f64 {
    4.0 * p as f64 / (p as f64 + 1.0)
}

struct Simpson<'a, F: Fn(f64) -> f64> {
    f: &'a F,
    intervals: usize,
}

impl<F: Fn(f64) -> f64> Simpson<'_, F> {
    #[allow(clippy::too_many_arguments)]
    fn step(&mut self, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = ((self.f)(lm), (self.f)(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        self.intervals += 1;
        if depth == 0 || self.intervals >= MAX_INTERVALS || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        self.step(a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + self.step(m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    // Split first so that integrands vanishing at the sample points are not misjudged.
    const PIECES: usize = 8;
    let mut runner = Simpson { f: &f, intervals: 0 };
    let h = (b - a) / PIECES as f64;
    (0..PIECES)
        .map(|i| {
            let lo = a + h * i as f64;
            let hi = if i + 1 == PIECES { b } else { lo + h };
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
            runner.step(lo, hi, fa, fm, fb, whole, tol / PIECES as f64, 48)
        })
        .sum()
}

/// `int_a^b g(x) dmu(x)` through the angle substitution.
pub fn integrate_against<G: Fn(f64) -> f64>(spec: MeasureSpec, g: G, a: f64, b: f64) -> Result<f64> {
    check_interval(a, b)?;
    let (t_lo, t_hi) = ((b / 2.0).acos(), (a / 2.0).acos());
    Ok(integrate(
        |t| g(2.0 * t.cos()) * angle_density(spec, t),
        t_lo,
        t_hi,
        QUAD_TOL,
    ))
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    for v in [a, b] {
        if !(-2.0..=2.0).contains(&v) {
            return Err(Error::OutOfDomain(v));
        }
    }
    if a > b {
        return Err(Error::InvalidBox(format!("reversed interval [{a}, {b}]")));
    }
    Ok(())
}

/// `mu([a, b])`.
///
/// Both measures are even, so intervals are reflected onto the nonnegative side
/// first; `cdf(a, b)` and `cdf(-b, -a)` then agree bit for bit.
pub fn cdf(spec: MeasureSpec, a: f64, b: f64) -> Result<f64> {
    check_interval(a, b)?;
    if a + b < 0.0 {
        integrate_against(spec, |_| 1.0, -b, -a)
    } else {
        integrate_against(spec, |_| 1.0, a, b)
    }
}

/// Weyl limit `c_m = int cos(m theta) dmu_p`: 1 at `m = 0`, 0 for odd `m`, and
/// `(p^{-m/2} - p^{-(m-2)/2}) / 2` for even `m >= 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeylLimit {
    pub m: u32,
    pub prime: u64,
    pub value: Rat,
}

fn inverse_power(p: u64, e: u32) -> Rat {
    Rat::new(1.into(), big_pow(p, e as u64))
}

pub fn weyl_limit(p: u64, m: u32) -> Result<WeylLimit> {
    validate_primes(&[p])?;
    let value = match m {
        0 => rat_int(1),
        m if m % 2 == 1 => Rat::zero(),
        m => (inverse_power(p, m / 2) - inverse_power(p, m / 2 - 1)) / rat_int(2),
    };
    Ok(WeylLimit { m, prime: p, value })
}

/// `int X_m dmu_p`: `p^{-m/2}` for even `m`, 0 for odd `m`.
pub fn chebyshev_moment_of_measure(p: u64, m: u32) -> Result<Rat> {
    validate_primes(&[p])?;
    Ok(if m % 2 == 1 { Rat::zero() } else { inverse_power(p, m / 2) })
}

/// Product of the per-prime Weyl limits.
pub fn joint_weyl_limit(primes: &[u64], exponents: &[u32]) -> Result<Rat> {
    validate_primes(primes)?;
    if primes.len() != exponents.len() {
        return Err(Error::DimensionMismatch { expected: primes.len(), got: exponents.len() });
    }
    primes
        .iter()
        .zip(exponents)
        .try_fold(rat_int(1), |acc, (&p, &m)| Ok(acc * weyl_limit(p, m)?.value))
}

/// Closed box `prod [alpha_i, beta_i]` inside `[-2, 2]^r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointBox {
    intervals: Vec<(f64, f64)>,
}

impl JointBox {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::InvalidBox("box has no axes".into()));
        }
        for &(a, b) in &intervals {
            if !a.is_finite() || !b.is_finite() || a < -2.0 || b > 2.0 || a > b {
                return Err(Error::InvalidBox(format!("[{a}, {b}] is not an interval inside [-2, 2]")));
            }
        }
        Ok(JointBox { intervals })
    }

    /// Parses `a1,b1,a2,b2,...`.
    pub fn from_endpoints(endpoints: &[f64]) -> Result<Self> {
        if endpoints.is_empty() || endpoints.len() % 2 == 1 {
            return Err(Error::InvalidBox(format!("expected 2r endpoints, got {}", endpoints.len())));
        }
        Self::new(endpoints.chunks(2).map(|c| (c[0], c[1])).collect())
    }

    pub fn full(r: usize) -> Self {
        JointBox { intervals: vec![(-2.0, 2.0); r] }
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    /// Closed-box membership; endpoints are inclusive.
    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.dim()
            && self.intervals.iter().zip(point).all(|(&(a, b), &x)| a <= x && x <= b)
    }

    /// The box `-I`.
    pub fn reflected(&self) -> Self {
        JointBox { intervals: self.intervals.iter().map(|&(a, b)| (-b, -a)).collect() }
    }

    /// Image in normalized-angle coordinates `x = arccos(a/2) / (2 pi)`, a box in `[0, 1/2]^r`.
    pub fn angle_intervals(&self) -> Vec<(f64, f64)> {
        self.intervals
            .iter()
            .map(|&(a, b)| ((b / 2.0).acos() / (2.0 * PI), (a / 2.0).acos() / (2.0 * PI)))
            .collect()
    }
}

/// `prod_i mu_{p_i}([alpha_i, beta_i])`.
pub fn box_measure(bx: &JointBox, primes: &[u64]) -> Result<f64> {
    if bx.dim() != primes.len() {
        return Err(Error::DimensionMismatch { expected: bx.dim(), got: primes.len() });
    }
    validate_primes(primes)?;
    bx.intervals
        .iter()
        .zip(primes)
        .try_fold(1.0, |acc, (&(a, b), &p)| Ok(acc * cdf(MeasureSpec::Prime(p), a, b)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebyshev_moments::chebyshev;
    use crate::exact_arith::{rat, rat_to_f64};

    const PRIMES: [u64; 4] = [2, 3, 5, 7];

    #[test]
    fn density_examples() {
        assert_eq!(density(MeasureSpec::Prime(2), 2.0).unwrap(), 0.0);
        assert_eq!(density(MeasureSpec::Prime(2), -2.0).unwrap(), 0.0);
        assert!((density(MeasureSpec::Infinity, 0.0).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert!((density(MeasureSpec::Prime(2), 0.0).unwrap() - 2.0 / (3.0 * PI)).abs() < 1e-15);
        assert!(matches!(density(MeasureSpec::Prime(2), 2.5), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn cdf_examples() {
        for p in PRIMES {
            let spec = MeasureSpec::Prime(p);
            assert!((cdf(spec, -2.0, 2.0).unwrap() - 1.0).abs() < 1e-10);
            assert!((cdf(spec, 0.0, 2.0).unwrap() - 0.5).abs() < 1e-10);
        }
        assert!((cdf(MeasureSpec::Infinity, -2.0, 2.0).unwrap() - 1.0).abs() < 1e-10);
        assert!(cdf(MeasureSpec::Prime(2), 1.0, 0.0).is_err());
    }

    #[test]
    fn cdf_matches_midpoint_rule() {
        let (a, b) = (-2.0, 0.5);
        let n = 1_000_000;
        let h = (b - a) / n as f64;
        let brute: f64 = (0..n)
            .map(|i| density(MeasureSpec::Prime(2), a + h * (i as f64 + 0.5)).unwrap())
            .sum::<f64>()
            * h;
        let quad = cdf(MeasureSpec::Prime(2), a, b).unwrap();
        assert!((quad - brute).abs() < 1e-8, "{quad} vs {brute}");
    }

    #[test]
    fn chebyshev_moments_match_quadrature() {
        for p in PRIMES {
            for m in 0..=10u32 {
                let poly = chebyshev(m as usize);
                let quad = integrate_against(MeasureSpec::Prime(p), |x| poly.eval(x), -2.0, 2.0).unwrap();
                let closed = rat_to_f64(&chebyshev_moment_of_measure(p, m).unwrap());
                assert!((quad - closed).abs() <= 1e-8, "p={p} m={m}: {quad} vs {closed}");
            }
        }
        assert_eq!(chebyshev_moment_of_measure(2, 2).unwrap(), rat(1, 2));
    }

    #[test]
    fn weyl_limits() {
        assert_eq!(weyl_limit(2, 0).unwrap().value, rat(1, 1));
        assert_eq!(weyl_limit(3, 5).unwrap().value, rat(0, 1));
        assert_eq!(weyl_limit(2, 2).unwrap().value, rat(-1, 4));
        for p in PRIMES {
            for m in 0..=10u32 {
                let quad = integrate(
                    |t| (m as f64 * t).cos() * angle_density(MeasureSpec::Prime(p), t),
                    0.0,
                    PI,
                    1e-12,
                );
                let closed = rat_to_f64(&weyl_limit(p, m).unwrap().value);
                assert!((quad - closed).abs() <= 1e-8, "p={p} m={m}");
            }
        }
    }

    #[test]
    fn joint_weyl_examples() {
        assert_eq!(joint_weyl_limit(&[2, 3], &[0, 0]).unwrap(), rat(1, 1));
        assert_eq!(joint_weyl_limit(&[2, 3], &[2, 3]).unwrap(), rat(0, 1));
        assert_eq!(joint_weyl_limit(&[2, 3], &[2, 2]).unwrap(), rat(1, 12));
        assert!(joint_weyl_limit(&[3, 3], &[2, 2]).is_err());
    }

    #[test]
    fn box_measure_examples() {
        let primes = [2, 3];
        assert!((box_measure(&JointBox::full(2), &primes).unwrap() - 1.0).abs() < 2e-10);
        let degenerate = JointBox::new(vec![(0.3, 0.3), (-2.0, 2.0)]).unwrap();
        assert_eq!(box_measure(&degenerate, &primes).unwrap(), 0.0);
        let quadrant = JointBox::new(vec![(0.0, 2.0), (0.0, 2.0)]).unwrap();
        assert!((box_measure(&quadrant, &primes).unwrap() - 0.25).abs() < 1e-9);
        assert!(box_measure(&quadrant, &[2]).is_err());
        assert!(JointBox::from_endpoints(&[1.0, 0.0]).is_err());
        assert!(JointBox::from_endpoints(&[-3.0, 0.0]).is_err());
        assert!(JointBox::from_endpoints(&[0.0]).is_err());
    }

    #[test]
    fn cdf_monotone_and_additive() {
        for p in PRIMES {
            let spec = MeasureSpec::Prime(p);
            let mut prev = 0.0;
            for i in 0..=40 {
                let b = -2.0 + 0.1 * i as f64;
                let v = cdf(spec, -2.0, b.min(2.0)).unwrap();
                assert!(v >= prev - 1e-12);
                prev = v;
            }
            for (a, m, b) in [(-2.0, -0.7, 1.3), (-1.0, 0.0, 1.0), (0.2, 1.9, 2.0)] {
                let whole = cdf(spec, a, b).unwrap();
                let parts = cdf(spec, a, m).unwrap() + cdf(spec, m, b).unwrap();
                assert!((whole - parts).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn converges_to_sato_tate() {
        let p = 1_000_000_007u64;
        let gap = (0..=400)
            .map(|i| -2.0 + 0.01 * i as f64)
            .map(|x| {
                (density(MeasureSpec::Prime(p), x).unwrap() - density(MeasureSpec::Infinity, x).unwrap()).abs()
            })
            .fold(0.0, f64::max);
        assert!(gap < 1e-4, "gap {gap}");
    }

    #[test]
    fn angle_density_sup_norm() {
        for p in PRIMES {
            let grid_max = (0..=10_000)
                .map(|i| normalized_angle_density(p, 0.5 * i as f64 / 10_000.0))
                .fold(0.0, f64::max);
            assert!((grid_max - normalized_angle_sup(p)).abs() < 1e-9);
            let mass = integrate(|x| normalized_angle_density(p, x), 0.0, 0.5, 1e-12);
            assert!((mass - 1.0).abs() < 1e-10);
        }
    }
}
