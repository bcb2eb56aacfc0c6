//! Exact integer and rational arithmetic, factorization, and the multiplicative
//! functions used by the trace formula.
//!
//! Big integers and rationals come from `num-bigint` / `num-rational`; a
//! [`Rat`] is always stored in lowest terms with a positive denominator.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

pub use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number in lowest terms.
pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int<T: Into<BigInt>>(v: T) -> Rat {
    Rat::from_integer(v.into())
}

/// Prime factorization with strictly increasing primes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Reconstructs the factored integer.
    pub fn value(&self) -> u128 {
        self.factors
            .iter()
            .map(|&(p, e)| (p as u128).pow(e))
            .product()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality for all `u64`.
///
/// Small factors are removed by trial division; the rest goes through Miller-Rabin with
/// the first twelve primes as witnesses, which is exact below 3.3e24.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// Brent's variant of Pollard rho; `n` must be an odd composite.
fn pollard_rho(n: u64) -> u64 {
    for c in 1u64.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!()
}

fn factor_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

fn factor_uncached(mut n: u64) -> Factorization {
    let mut primes = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while n % p == 0 {
            primes.push(p);
            n /= p;
        }
    }
    factor_into(n, &mut primes);
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Factorization { factors }
}

fn factor_cache() -> &'static Mutex<HashMap<u64, Factorization>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Factorization>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Factors `n`, memoizing the result for the lifetime of the process.
pub fn factor(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::ZeroArgument("n"));
    }
    if let Some(f) = factor_cache().lock().unwrap().get(&n) {
        return Ok(f.clone());
    }
    let f = factor_uncached(n);
    factor_cache().lock().unwrap().insert(n, f.clone());
    Ok(f)
}

/// Index of Gamma_0(N) in SL_2(Z): `N * prod_{p | N} (1 + 1/p)`.
pub fn psi(level: u64) -> Result<u64> {
    let f = factor(level)?;
    Ok(f.primes().fold(level, |acc, p| acc / p * (p + 1)))
}

pub fn euler_phi(n: u64) -> Result<u64> {
    let f = factor(n)?;
    Ok(f.primes().fold(n, |acc, p| acc / p * (p - 1)))
}

/// Number of positive divisors, d(n).
pub fn num_divisors(n: u64) -> Result<u64> {
    Ok(factor(n)?.factors().iter().map(|&(_, e)| e as u64 + 1).product())
}

/// Number of distinct prime divisors.
pub fn nu(n: u64) -> Result<u32> {
    Ok(factor(n)?.factors().len() as u32)
}

/// Positive divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    let f = factor(n)?;
    let mut divs = vec![1u64];
    for &(p, e) in f.factors() {
        let current = divs.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..current {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    Ok(divs)
}

pub fn sigma(n: u64) -> Result<u64> {
    Ok(divisors(n)?.iter().sum())
}

pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Returns `Some(r)` when `n = r^2`.
pub fn exact_sqrt(n: u64) -> Option<u64> {
    let r = isqrt(n);
    (r * r == n).then_some(r)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Checks that `primes` holds distinct primes.
pub fn validate_primes(primes: &[u64]) -> Result<()> {
    for (i, &p) in primes.iter().enumerate() {
        if !is_prime(p) || primes[..i].contains(&p) {
            return Err(Error::InvalidPrimes(format!("{primes:?}")));
        }
    }
    Ok(())
}

pub(crate) fn check_weight(k: u32) -> Result<()> {
    if k < 2 || k % 2 == 1 {
        return Err(Error::InvalidWeight(k));
    }
    Ok(())
}

/// `(rho^{k-1} - rhobar^{k-1}) / (rho - rhobar)` for the roots of `x^2 - t x + n`.
///
/// Evaluated through the integer recurrence `a_j = t a_{j-1} - n a_{j-2}` with
/// `a_1 = 1`, `a_2 = t`; the result is `a_{k-1}`.
pub fn lucas_weight(t: i64, n: u64, k: u32) -> Result<BigInt> {
    check_weight(k)?;
    Ok(lucas_sequence(t, n, k as usize - 1).pop().unwrap())
}

/// Returns `[a_1, ..., a_len]` of the Lucas sequence attached to `x^2 - t x + n`.
pub fn lucas_sequence(t: i64, n: u64, len: usize) -> Vec<BigInt> {
    let t = BigInt::from(t);
    let n = BigInt::from(n);
    let mut seq: Vec<BigInt> = Vec::with_capacity(len);
    for j in 0..len {
        let next = match j {
            0 => BigInt::one(),
            1 => t.clone(),
            _ => &t * &seq[j - 1] - &n * &seq[j - 2],
        };
        seq.push(next);
    }
    seq
}

/// Converts a rational that is known to be an integer.
pub fn rat_to_integer(r: &Rat) -> Option<BigInt> {
    r.is_integer().then(|| r.to_integer())
}

/// `base^exp` as a big integer.
pub fn big_pow(base: u64, exp: u64) -> BigInt {
    num_traits::pow(BigInt::from(base), exp as usize)
}

/// Lossy conversion of `num / prod p_i^{h_i / 2}` to `f64`.
///
/// The integral part of each square root is divided out exactly before converting,
/// so the only rounding comes from one big-rational conversion and one `sqrt` per
/// odd exponent.
pub fn scaled_to_f64(num: &BigInt, scale: &[(u64, u64)]) -> f64 {
    let mut den = BigInt::one();
    let mut residual = 1.0f64;
    for &(p, h) in scale {
        den *= big_pow(p, h / 2);
        if h % 2 == 1 {
            residual *= (p as f64).sqrt();
        }
    }
    let q = Rat::new(num.clone(), den);
    q.to_f64().unwrap_or(f64::NAN) / residual
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn is_nonneg(r: &Rat) -> bool {
    !r.is_negative()
}

pub fn is_zero(r: &Rat) -> bool {
    r.is_zero()
}
