//! Chebyshev polynomials `X_m(2 cos t) = sin((m+1)t) / sin t` and the normalized trace
//! moments they produce.
//!
//! Since `T'_{p^m} = X_m(T'_p)`, the cosine sums over eigenvalue angles are traces:
//! `sum_n 2 cos(m theta_n) = Tr T'_{p^m} - Tr T'_{p^{m-2}}`. All such quantities carry a
//! factor `p^{-m(k-1)/2}`, which is kept symbolic in [`ScaledValue`].

use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::eichler_selberg::{trace, TraceRequest};
use crate::error::{Error, Result};
use crate::exact_arith::{big_pow, gcd, scaled_to_f64, validate_primes, BigInt};

/// Exact value `int / prod_i p_i^{h_i / 2}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledValue {
    pub int: BigInt,
    /// Pairs `(p, h)`: the value is divided by `p^{h/2}`.
    pub scale: Vec<(u64, u64)>,
}

impl ScaledValue {
    pub fn to_f64(&self) -> f64 {
        scaled_to_f64(&self.int, &self.scale)
    }

    /// Float rendering with an absolute error bound covering the big-rational
    /// conversion and one rounded `sqrt` and division per odd half-exponent.
    pub fn to_f64_with_error(&self) -> (f64, f64) {
        let v = self.to_f64();
        let roundings = 1 + 2 * self.scale.iter().filter(|(_, h)| h % 2 == 1).count();
        (v, v.abs() * f64::EPSILON * roundings as f64)
    }

    /// Sum of `log2 p * h` over the scale: `log2` of the squared divisor.
    pub fn log2_scale(&self) -> f64 {
        self.scale.iter().map(|&(p, h)| (p as f64).log2() * h as f64).sum()
    }
}

/// `X_m` with integer coefficients in increasing degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChebyshevPoly {
    pub coeffs: Vec<BigInt>,
}

impl ChebyshevPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    fn shift_sub(&self, prev: &ChebyshevPoly) -> ChebyshevPoly {
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i + 1] += c;
        }
        for (i, c) in prev.coeffs.iter().enumerate() {
            coeffs[i] -= c;
        }
        ChebyshevPoly { coeffs }
    }
}

/// `X_0, ..., X_max` by `X_m = x X_{m-1} - X_{m-2}`.
pub fn chebyshev_family(max: usize) -> Vec<ChebyshevPoly> {
    let mut family = vec![ChebyshevPoly { coeffs: vec![BigInt::one()] }];
    if max >= 1 {
        family.push(ChebyshevPoly { coeffs: vec![BigInt::zero(), BigInt::one()] });
    }
    for m in 2..=max {
        let next = family[m - 1].shift_sub(&family[m - 2]);
        family.push(next);
    }
    family
}

pub fn chebyshev(m: usize) -> ChebyshevPoly {
    chebyshev_family(m).pop().unwrap()
}

/// Polynomial `P_m` with `P_m(2 cos t) = 2 cos(m t)`: `X_1` for `m = 1`, `X_m - X_{m-2}` above.
pub fn cosine_polynomial(m: usize) -> Result<ChebyshevPoly> {
    if m == 0 {
        return Err(Error::ZeroArgument("m"));
    }
    let family = chebyshev_family(m);
    if m == 1 {
        return Ok(family[1].clone());
    }
    let mut coeffs = family[m].coeffs.clone();
    for (i, c) in family[m - 2].coeffs.iter().enumerate() {
        coeffs[i] -= c;
    }
    Ok(ChebyshevPoly { coeffs })
}

/// `Tr T'_{p^m}` for `m = 0..=max_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentVector {
    pub prime: u64,
    pub level: u64,
    pub weight: u32,
    pub entries: Vec<ScaledValue>,
}

impl MomentVector {
    pub fn floats(&self) -> Vec<f64> {
        self.entries.iter().map(ScaledValue::to_f64).collect()
    }
}

fn check_prime_for_level(p: u64, level: u64) -> Result<()> {
    validate_primes(&[p])?;
    if gcd(p, level) != 1 {
        return Err(Error::NotCoprime { n: p, level });
    }
    Ok(())
}

fn trace_total(n: u64, level: u64, weight: u32) -> Result<BigInt> {
    Ok(trace(&TraceRequest::new(n, level, weight)?)?.total)
}

pub fn moment_vector(p: u64, level: u64, weight: u32, max_m: u32) -> Result<MomentVector> {
    check_prime_for_level(p, level)?;
    let entries = (0..=max_m)
        .map(|m| {
            Ok(ScaledValue {
                int: trace_total(p.pow(m), level, weight)?,
                scale: vec![(p, m as u64 * (weight as u64 - 1))],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MomentVector { prime: p, level, weight, entries })
}

/// `sum_n 2 cos(m theta_n(p))` over an eigenbasis of `S(N, k)`.
pub fn cosine_moment_sum(p: u64, m: u32, level: u64, weight: u32) -> Result<ScaledValue> {
    joint_cosine_product(&JointMomentRequest {
        primes: vec![p],
        exponents: vec![m],
        level,
        weight,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JointMomentRequest {
    pub primes: Vec<u64>,
    pub exponents: Vec<u32>,
    pub level: u64,
    pub weight: u32,
}

impl JointMomentRequest {
    fn validate(&self) -> Result<()> {
        if self.primes.is_empty() {
            return Err(Error::InvalidPrimes("empty prime list".into()));
        }
        validate_primes(&self.primes)?;
        if self.exponents.len() != self.primes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.primes.len(),
                got: self.exponents.len(),
            });
        }
        if self.exponents.iter().any(|&m| m == 0) {
            return Err(Error::ZeroArgument("m"));
        }
        for &p in &self.primes {
            check_prime_for_level(p, self.level)?;
        }
        Ok(())
    }
}

/// `sum_n prod_i 2 cos(m_i theta_i^(n))`, expanded as the signed sum over
/// `b_i in {m_i, m_i - 2}` of `Tr T'_{prod p_i^{b_i}}`.
///
/// The result is normalized to the common scale `prod p_i^{m_i (k-1)/2}`; each
/// lowered index contributes an extra integral factor `p_i^{k-1}`.
pub fn joint_cosine_product(req: &JointMomentRequest) -> Result<ScaledValue> {
    req.validate()?;
    let r = req.primes.len();
    let km1 = req.weight as u64 - 1;
    let mut total = BigInt::zero();
    for mask in 0u32..(1 << r) {
        let mut n = 1u64;
        let mut factor = BigInt::one();
        let mut skip = false;
        for i in 0..r {
            let (p, m) = (req.primes[i], req.exponents[i]);
            if mask & (1 << i) != 0 {
                if m < 2 {
                    skip = true;
                    break;
                }
                n *= p.pow(m - 2);
                factor *= -big_pow(p, km1);
            } else {
                n *= p.pow(m);
            }
        }
        if skip {
            continue;
        }
        total += factor * trace_total(n, req.level, req.weight)?;
    }
    let scale = req
        .primes
        .iter()
        .zip(&req.exponents)
        .map(|(&p, &m)| (p, m as u64 * km1))
        .collect();
    Ok(ScaledValue { int: total, scale })
}
