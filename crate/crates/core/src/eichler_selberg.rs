//! Eichler-Selberg trace formula for `T_n` on `S_k(Gamma_0(N))`, `gcd(n, N) = 1`.
//!
//! `Tr T_n = A1 + A2 + A3 + A4` where
//!
//! * `A1` is the identity contribution, nonzero only for square `n`;
//! * `A2` is the elliptic term, a sum over `t^2 < 4n` of Lucas weights times weighted
//!   class numbers `h_w((t^2 - 4n)/g^2)` and local root counts;
//! * `A3` is the hyperbolic divisor term;
//! * `A4` is the weight-2 correction `sigma(n)`.
//!
//! Every term is an exact rational; only their sum is guaranteed to be an integer.

use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::binary_quadratic::{class_number_weighted, Discriminant};
use crate::error::{Error, Result};
use crate::exact_arith::{
    big_pow, check_weight, divisors, euler_phi, exact_sqrt, factor, gcd, isqrt,
    lucas_sequence, num_divisors, psi, rat_int, rat_to_integer, sigma, validate_primes,
    BigInt, Rat,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct TraceRequest {
    pub n: u64,
    pub level: u64,
    pub weight: u32,
}

impl TraceRequest {
    pub fn new(n: u64, level: u64, weight: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroArgument("n"));
        }
        if level == 0 {
            return Err(Error::ZeroArgument("level"));
        }
        check_weight(weight)?;
        if gcd(n, level) != 1 {
            return Err(Error::NotCoprime { n, level });
        }
        Ok(TraceRequest { n, level, weight })
    }
}

/// The four exact terms of the trace formula and their integral sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceBreakdown {
    pub request: TraceRequest,
    pub a1: Rat,
    pub a2: Rat,
    pub a3: Rat,
    pub a4: Rat,
    pub total: BigInt,
}

// Number of x mod p^e with x^2 - t x + n = 0 mod p^e.
fn local_root_count(t: i64, n: u64, p: u64, e: u32) -> u64 {
    let q = p.pow(e) as i128;
    let (t, n) = (t as i128, n as i128);
    (0..q).filter(|&x| (x * x - t * x + n).rem_euclid(q) == 0).count() as u64
}

/// `#{x mod K : x^2 - t x + n = 0 (mod K)}`, composed over the prime powers of `K`.
pub fn congruence_count(t: i64, n: u64, modulus: u64) -> Result<u64> {
    if modulus == 0 {
        return Err(Error::ZeroArgument("modulus"));
    }
    Ok(factor(modulus)?
        .factors()
        .iter()
        .map(|&(p, e)| local_root_count(t, n, p, e))
        .product())
}

/// Number of residues `x mod N` that lift to a root of `x^2 - t x + n` modulo `K`,
/// where `N | K` and both share the same prime support.
///
/// This is the count entering the elliptic weight: for `K = N * gcd(N, g)` the
/// roots are counted modulo `N`, not modulo `K`.
pub fn lifted_root_count(t: i64, n: u64, level: u64, modulus: u64) -> Result<u64> {
    if level == 0 || modulus == 0 {
        return Err(Error::ZeroArgument("modulus"));
    }
    debug_assert_eq!(modulus % level, 0);
    let fk = factor(modulus)?;
    let mut count = 1u64;
    for &(p, e_k) in fk.factors() {
        let mut e_n = 0;
        let mut rest = level;
        while rest % p == 0 {
            rest /= p;
            e_n += 1;
        }
        let q_k = p.pow(e_k) as i128;
        let q_n = p.pow(e_n) as i128;
        let (ti, ni) = (t as i128, n as i128);
        let mut seen = vec![false; q_n as usize];
        for x in 0..q_k {
            if (x * x - ti * x + ni).rem_euclid(q_k) == 0 {
                seen[(x % q_n) as usize] = true;
            }
        }
        count *= seen.iter().filter(|&&s| s).count() as u64;
    }
    Ok(count)
}

/// `psi(N) / psi(N / N_g) * M(t, n, N N_g)` with `N_g = gcd(N, g)`.
pub fn mu_weight(t: i64, g: u64, n: u64, level: u64) -> Result<Rat> {
    if g == 0 {
        return Err(Error::ZeroArgument("g"));
    }
    let ng = gcd(level, g);
    let ratio = Rat::new(psi(level)?.into(), psi(level / ng)?.into());
    Ok(ratio * rat_int(lifted_root_count(t, n, level, level * ng)?))
}

pub fn term_a1(req: &TraceRequest) -> Result<Rat> {
    let Some(_) = exact_sqrt(req.n) else {
        return Ok(Rat::zero());
    };
    let k = req.weight as u64;
    let power = big_pow(req.n, k / 2 - 1);
    let numer = power * BigInt::from(k - 1) * BigInt::from(psi(req.level)?);
    Ok(Rat::new(numer, BigInt::from(12)))
}

// `sum_g h_w((t^2-4n)/g^2) mu(t,g,n)`; independent of the weight.
fn elliptic_inner(t: i64, n: u64, level: u64) -> Result<Rat> {
    let disc = t * t - 4 * n as i64;
    let mut inner = Rat::zero();
    for g in 1..=isqrt(disc.unsigned_abs()) as i64 {
        let g2 = g * g;
        if disc % g2 != 0 || !Discriminant::is_valid(disc / g2) {
            continue;
        }
        let d = Discriminant::new(disc / g2)?;
        inner += class_number_weighted(d) * mu_weight(t, g as u64, n, level)?;
    }
    Ok(inner)
}

// (t, inner(t)) for 0 <= t with t^2 < 4n.
fn elliptic_data(n: u64, level: u64) -> Result<Vec<(i64, Rat)>> {
    let t_max = isqrt(4 * n - 1) as i64;
    (0..=t_max)
        .into_par_iter()
        .map(|t| Ok((t, elliptic_inner(t, n, level)?)))
        .collect()
}

fn a2_from_data(data: &[(i64, Rat)], n: u64, weight: u32) -> Rat {
    let mut sum = Rat::zero();
    for (t, inner) in data {
        if inner.is_zero() {
            continue;
        }
        let g = lucas_sequence(*t, n, weight as usize - 1).pop().unwrap();
        let mult = if *t == 0 { 1 } else { 2 };
        sum += inner * rat_int(g * mult);
    }
    -sum / rat_int(2)
}

/// Elliptic term, summing `t >= 0` and doubling `t > 0` (the summand is even in `t`).
pub fn term_a2(req: &TraceRequest) -> Result<Rat> {
    Ok(a2_from_data(&elliptic_data(req.n, req.level)?, req.n, req.weight))
}

/// Elliptic term summed over every `t` with `t^2 < 4n`, negative `t` included.
pub fn term_a2_unfolded(req: &TraceRequest) -> Result<Rat> {
    let t_max = isqrt(4 * req.n - 1) as i64;
    let mut sum = Rat::zero();
    for t in -t_max..=t_max {
        let g = lucas_sequence(t, req.n, req.weight as usize - 1).pop().unwrap();
        sum += elliptic_inner(t, req.n, req.level)? * rat_int(g);
    }
    Ok(-sum / rat_int(2))
}

// Per divisor d <= sqrt(n): the level factor sum_{c | N} phi(gcd(c, N/c)) restricted to
// gcd(c, N/c) | gcd(N, n/d - d), and whether d = sqrt(n).
fn hyperbolic_data(n: u64, level: u64) -> Result<Vec<(u64, u64, bool)>> {
    let root = isqrt(n);
    let level_divs = divisors(level)?;
    let mut out = Vec::new();
    for d in divisors(n)?.into_iter().take_while(|&d| d <= root) {
        let g = gcd(level, n / d - d);
        let mut weight = 0;
        for &c in &level_divs {
            let h = gcd(c, level / c);
            if g % h == 0 {
                weight += euler_phi(h)?;
            }
        }
        out.push((d, weight, d * d == n));
    }
    Ok(out)
}

fn a3_from_data(data: &[(u64, u64, bool)], weight: u32) -> Rat {
    let mut sum = Rat::zero();
    for &(d, level_factor, is_root) in data {
        let term = rat_int(big_pow(d, weight as u64 - 1) * BigInt::from(level_factor));
        sum += if is_root { term / rat_int(2) } else { term };
    }
    -sum
}

pub fn term_a3(req: &TraceRequest) -> Result<Rat> {
    Ok(a3_from_data(&hyperbolic_data(req.n, req.level)?, req.weight))
}

/// `sigma(n)` at weight 2, zero otherwise.
pub fn term_a4(req: &TraceRequest) -> Result<Rat> {
    if req.weight == 2 {
        Ok(rat_int(sigma(req.n)?))
    } else {
        Ok(Rat::zero())
    }
}

fn assemble(req: TraceRequest, a1: Rat, a2: Rat, a3: Rat, a4: Rat) -> Result<TraceBreakdown> {
    let sum = &a1 + &a2 + &a3 + &a4;
    let total = rat_to_integer(&sum).ok_or_else(|| Error::NonIntegralTrace {
        n: req.n,
        level: req.level,
        weight: req.weight,
        value: sum.to_string(),
    })?;
    Ok(TraceBreakdown { request: req, a1, a2, a3, a4, total })
}

/// Exact trace of `T_n` on `S(N, k)` with its term breakdown.
pub fn trace(req: &TraceRequest) -> Result<TraceBreakdown> {
    assemble(*req, term_a1(req)?, term_a2(req)?, term_a3(req)?, term_a4(req)?)
}

/// Traces of `T_n` on `S(N, k)` for several weights, sharing the weight-independent
/// class-number and divisor data.
pub fn traces_for_weights(n: u64, level: u64, weights: &[u32]) -> Result<Vec<TraceBreakdown>> {
    for &k in weights {
        TraceRequest::new(n, level, k)?;
    }
    let elliptic = elliptic_data(n, level)?;
    let hyperbolic = hyperbolic_data(n, level)?;
    weights
        .iter()
        .map(|&k| {
            let req = TraceRequest::new(n, level, k)?;
            let a1 = term_a1(&req)?;
            let a2 = a2_from_data(&elliptic, n, k);
            let a3 = a3_from_data(&hyperbolic, k);
            let a4 = term_a4(&req)?;
            assemble(req, a1, a2, a3, a4)
        })
        .collect()
}

/// `dim S(N, k)` as the trace of `T_1`.
pub fn dimension(level: u64, weight: u32) -> Result<u64> {
    let total = trace(&TraceRequest::new(1, level, weight)?)?.total;
    Ok(total.to_u64().expect("dimension is a nonnegative machine integer"))
}

/// Shape of the bound `prod p_i^{3 m_i/2} * prod m_i * d(N) * sqrt(N) * log(4 prod p_i^{m_i})`
/// with implied constant 1.
pub fn prop_p1_bound(exponents: &[u32], primes: &[u64], level: u64) -> Result<f64> {
    validate_primes(primes)?;
    if exponents.len() != primes.len() {
        return Err(Error::DimensionMismatch { expected: primes.len(), got: exponents.len() });
    }
    if exponents.iter().any(|&m| m == 0) {
        return Err(Error::ZeroArgument("exponent"));
    }
    if level == 0 {
        return Err(Error::ZeroArgument("level"));
    }
    let mut log_n = 0.0;
    let mut power = 1.0;
    let mut m_prod = 1.0;
    for (&m, &p) in exponents.iter().zip(primes) {
        let lp = (p as f64).ln();
        log_n += m as f64 * lp;
        power *= (1.5 * m as f64 * lp).exp();
        m_prod *= m as f64;
    }
    let d_n = num_divisors(level)? as f64;
    Ok(power * m_prod * d_n * (level as f64).sqrt() * (4f64.ln() + log_n))
}

/// `|Tr T'_n| = |Tr T_n| / n^{(k-1)/2}` as a float.
pub fn normalized_trace_abs(b: &TraceBreakdown) -> f64 {
    let req = b.request;
    let log = b.total.abs().to_f64().map(f64::ln).unwrap_or(f64::INFINITY)
        - 0.5 * (req.weight as f64 - 1.0) * (req.n as f64).ln();
    if b.total.is_zero() {
        0.0
    } else {
        log.exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::rat;

    fn req(n: u64, level: u64, k: u32) -> TraceRequest {
        TraceRequest::new(n, level, k).unwrap()
    }

    #[test]
    fn congruence_count_examples() {
        assert_eq!(congruence_count(5, 3, 1).unwrap(), 1);
        assert_eq!(congruence_count(0, 1, 2).unwrap(), 1);
        assert_eq!(congruence_count(1, 1, 3).unwrap(), 1);
        assert_eq!(congruence_count(0, 1, 0), Err(Error::ZeroArgument("modulus")));
    }

    #[test]
    fn congruence_count_matches_brute_force() {
        for k in 1..=300u64 {
            for t in -6..=6i64 {
                for n in 1..=12u64 {
                    let brute = (0..k as i64)
                        .filter(|&x| (x * x - t * x + n as i64).rem_euclid(k as i64) == 0)
                        .count() as u64;
                    assert_eq!(congruence_count(t, n, k).unwrap(), brute);
                }
            }
        }
    }

    #[test]
    fn mu_weight_examples() {
        assert_eq!(mu_weight(3, 5, 7, 1).unwrap(), rat_int(1));
        // x^2 + 2 = 0 mod 11 at x = 3, 8
        let brute = (0..11).filter(|x| (x * x + 2) % 11 == 0).count() as i64;
        assert_eq!(brute, 2);
        assert_eq!(mu_weight(0, 1, 2, 11).unwrap(), rat_int(brute));
        assert_eq!(mu_weight(1, 1, 1, 2).unwrap(), rat_int(0));
        assert!(mu_weight(1, 0, 1, 2).is_err());
    }

    #[test]
    fn lifted_count_is_coarser_than_full_count() {
        // (x - 1)^2 mod 81 has 9 roots, which collapse to 3 residues mod 27
        assert_eq!(congruence_count(2, 1, 81).unwrap(), 9);
        assert_eq!(lifted_root_count(2, 1, 27, 81).unwrap(), 3);
    }

    #[test]
    fn level_one_weight_twelve_terms() {
        let b = trace(&req(1, 1, 12)).unwrap();
        assert_eq!(b.a1, rat(11, 12));
        assert_eq!(b.a2, rat(7, 12));
        assert_eq!(b.a3, rat(-1, 2));
        assert_eq!(b.a4, rat_int(0));
        assert_eq!(b.total, BigInt::from(1));

        assert_eq!(term_a1(&req(2, 1, 12)).unwrap(), rat_int(0));
        assert_eq!(term_a2(&req(2, 1, 12)).unwrap(), rat_int(-23));
        assert_eq!(trace(&req(2, 1, 12)).unwrap().total, BigInt::from(-24));
    }

    #[test]
    fn level_eleven_weight_two() {
        assert_eq!(trace(&req(2, 11, 2)).unwrap().total, BigInt::from(-2));
        assert_eq!(dimension(11, 2).unwrap(), 1);
    }

    #[test]
    fn dimensions() {
        assert_eq!(dimension(1, 12).unwrap(), 1);
        assert_eq!(dimension(1, 14).unwrap(), 0);
        assert_eq!(dimension(1, 2).unwrap(), 0);
        assert_eq!(dimension(1, 24).unwrap(), 2);
    }

    #[test]
    fn rejects_bad_requests() {
        assert_eq!(TraceRequest::new(2, 2, 12), Err(Error::NotCoprime { n: 2, level: 2 }));
        assert_eq!(TraceRequest::new(3, 1, 11), Err(Error::InvalidWeight(11)));
        assert_eq!(TraceRequest::new(0, 1, 12), Err(Error::ZeroArgument("n")));
    }

    // a_p of y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 by point counting.
    fn curve_ap(p: i64, [a1, a2, a3, a4, a6]: [i64; 5]) -> i64 {
        let mut count = 1;
        for x in 0..p {
            for y in 0..p {
                let lhs = y * y + a1 * x * y + a3 * y;
                let rhs = x * x * x + a2 * x * x + a4 * x + a6;
                if (lhs - rhs).rem_euclid(p) == 0 {
                    count += 1;
                }
            }
        }
        p + 1 - count
    }

    // One-dimensional S(N, 2) are spanned by the newform of an elliptic curve of
    // conductor N; these levels have square factors, where g > 1 meets N.
    #[test]
    fn weight_two_levels_with_square_factors() {
        let curves: [(u64, [i64; 5]); 4] = [
            (27, [0, 0, 1, 0, -7]),
            (32, [0, 0, 0, 4, 0]),
            (36, [0, 0, 0, 0, 1]),
            (49, [1, -1, 0, -2, -1]),
        ];
        for (level, coeffs) in curves {
            assert_eq!(dimension(level, 2).unwrap(), 1);
            for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
                if level % p == 0 {
                    continue;
                }
                let tr = trace(&req(p, level, 2)).unwrap().total;
                assert_eq!(tr, BigInt::from(curve_ap(p as i64, coeffs)), "N={level} p={p}");
            }
        }
    }

    #[test]
    fn integrality_grid() {
        let weights: Vec<u32> = (2..=30).step_by(2).collect();
        for level in 1..=30u64 {
            for n in 1..=50u64 {
                if gcd(n, level) != 1 {
                    continue;
                }
                // assemble() rejects any non-integral sum
                traces_for_weights(n, level, &weights).unwrap();
            }
        }
    }

    #[test]
    fn folded_a2_matches_full_sum() {
        for level in [1u64, 4, 9, 11, 12] {
            for n in 1..=30u64 {
                if gcd(n, level) != 1 {
                    continue;
                }
                for k in [2u32, 4, 12, 18] {
                    let r = req(n, level, k);
                    assert_eq!(term_a2(&r).unwrap(), term_a2_unfolded(&r).unwrap());
                }
            }
        }
    }

    #[test]
    fn multi_weight_agrees_with_single() {
        let weights = [2u32, 4, 12, 20];
        let batch = traces_for_weights(7, 10, &weights).unwrap();
        for (b, &k) in batch.iter().zip(&weights) {
            assert_eq!(*b, trace(&req(7, 10, k)).unwrap());
        }
    }

    #[test]
    fn hecke_recursion_on_one_dimensional_spaces() {
        for k in [12u32, 16, 18, 20, 22, 26] {
            assert_eq!(dimension(1, k).unwrap(), 1);
            let lam = |n: u64| trace(&req(n, 1, k)).unwrap().total;
            for p in [2u64, 3, 5, 7] {
                assert_eq!(lam(p * p), lam(p).pow(2) - big_pow(p, k as u64 - 1), "k={k} p={p}");
            }
            assert_eq!(lam(6), lam(2) * lam(3));
            assert_eq!(lam(10), lam(2) * lam(5));
            assert_eq!(lam(21), lam(3) * lam(7));
        }
    }

    #[test]
    fn deligne_bound_on_traces() {
        for level in 1..=30u64 {
            for p in [2u64, 3, 5, 7, 11, 13] {
                if level % p == 0 {
                    continue;
                }
                let weights: Vec<u32> = (2..=30).step_by(2).collect();
                for b in traces_for_weights(p, level, &weights).unwrap() {
                    let dim = dimension(level, b.request.weight).unwrap() as f64;
                    assert!(
                        normalized_trace_abs(&b) <= 2.0 * dim + 1e-9,
                        "p={p} N={level} k={}",
                        b.request.weight
                    );
                }
            }
        }
    }

    #[test]
    fn prop_p1_examples() {
        let close = |a: f64, b: f64, tol: f64| (a - b).abs() < tol;
        assert!(close(prop_p1_bound(&[1], &[2], 1).unwrap(), 2f64.powf(1.5) * 8f64.ln(), 1e-12));
        assert!(close(prop_p1_bound(&[1], &[2], 1).unwrap(), 5.88, 0.01));
        assert!(close(prop_p1_bound(&[2], &[2], 1).unwrap(), 44.36, 0.01));
        assert!(close(prop_p1_bound(&[1, 1], &[2, 3], 1).unwrap(), 46.7, 0.05));
        assert!(prop_p1_bound(&[1, 1], &[2, 2], 1).is_err());
    }

    // Empirical constant for the shape of the bound; the largest ratio is printed.
    #[test]
    fn prop_p1_empirical_constant() {
        let weights: Vec<u32> = (2..=40).step_by(2).collect();
        let mut worst: f64 = 0.0;
        for p in [2u64, 3, 5, 7] {
            for m in 1..=6u32 {
                for level in 1..=20u64 {
                    if level % p == 0 {
                        continue;
                    }
                    let bound = prop_p1_bound(&[m], &[p], level).unwrap();
                    for b in traces_for_weights(p.pow(m), level, &weights).unwrap() {
                        worst = worst.max(normalized_trace_abs(&b) / bound);
                    }
                }
            }
        }
        println!("max |Tr T'_(p^m)| / bound = {worst:.4}");
        assert!(worst <= 16.0, "empirical constant {worst}");
    }
}
