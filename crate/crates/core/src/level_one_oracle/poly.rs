//! Univariate polynomials over Z and Q, with Sturm-sequence real root isolation.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exact_arith::{BigInt, Rat};

/// Polynomial over Q, coefficients in increasing degree, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatPoly {
    coeffs: Vec<Rat>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[BigInt]) -> Self {
        Self::new(coeffs.iter().cloned().map(Rat::from_integer).collect())
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.coeffs.iter().rev().fold(Rat::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rat::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn monic(&self) -> Self {
        let lc = self.leading();
        Self::new(self.coeffs.iter().map(|c| c / &lc).collect())
    }

    pub fn div_rem(&self, divisor: &RatPoly) -> (RatPoly, RatPoly) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let mut rem = self.coeffs.clone();
        let dd = divisor.degree();
        let lc = divisor.leading();
        if rem.len() < divisor.coeffs.len() {
            return (RatPoly::new(vec![]), self.clone());
        }
        let mut quot = vec![Rat::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd] / &lc;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= &c * d;
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        (RatPoly::new(quot), RatPoly::new(rem))
    }

    /// Monic greatest common divisor.
    ///
    /// Runs the primitive remainder sequence over Z, which keeps coefficients small
    /// compared with Euclid over Q.
    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let (mut a, mut b) = (self.to_primitive_int(), other.to_primitive_int());
        while !b.is_empty() {
            let r = primitive(pseudo_rem(&a, &b));
            a = b;
            b = r;
        }
        if a.is_empty() {
            RatPoly::new(vec![])
        } else {
            RatPoly::from_ints(&a).monic()
        }
    }

    /// Yun's square-free factorization: `self = c * prod_i a_i^i`, returned as `(a_i, i)`
    /// for the nonconstant factors.
    pub fn squarefree_factors(&self) -> Vec<(RatPoly, usize)> {
        let mut out = Vec::new();
        if self.degree() == 0 {
            return out;
        }
        let d = self.derivative();
        let a0 = self.gcd(&d);
        let mut b = self.div_rem(&a0).0;
        let mut c = d.div_rem(&a0).0;
        let mut dd = sub(&c, &b.derivative());
        let mut i = 1;
        while b.degree() > 0 {
            let a = b.gcd(&dd);
            b = b.div_rem(&a).0;
            c = dd.div_rem(&a).0;
            dd = sub(&c, &b.derivative());
            if a.degree() > 0 {
                out.push((a, i));
            }
            i += 1;
        }
        out
    }

    /// Integer polynomial with the same roots: denominators cleared, content removed,
    /// and a positive scaling so signs of values are preserved.
    pub fn to_primitive_int(&self) -> Vec<BigInt> {
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * Rat::from_integer(lcm.clone())).to_integer()).collect();
        let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if content.is_zero() {
            return ints;
        }
        ints.into_iter().map(|c| c / &content).collect()
    }
}

fn trim(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

/// Divides out the (nonnegative) content, keeping signs.
fn primitive(v: Vec<BigInt>) -> Vec<BigInt> {
    let content = v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if content.is_zero() || content.is_one() {
        return v;
    }
    v.into_iter().map(|c| c / &content).collect()
}

/// Remainder of `lc(b)^(deg a - deg b + 1) * a` on division by `b`, computed over Z.
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = trim(a.to_vec());
    let db = b.len() - 1;
    let lc = &b[db];
    if r.len() < b.len() {
        return r;
    }
    let steps = r.len() - db;
    for _ in 0..steps {
        if r.len() < b.len() {
            // a skipped degree still owes one factor of lc
            r = r.into_iter().map(|c| c * lc).collect();
            continue;
        }
        let shift = r.len() - b.len();
        let top = r.last().unwrap().clone();
        for c in r.iter_mut() {
            *c *= lc;
        }
        for (j, d) in b.iter().enumerate() {
            r[shift + j] -= &top * d;
        }
        r = trim(r);
    }
    r
}

fn sub(a: &RatPoly, b: &RatPoly) -> RatPoly {
    let n = a.coeffs.len().max(b.coeffs.len());
    RatPoly::new(
        (0..n)
            .map(|i| {
                let x = a.coeffs.get(i).cloned().unwrap_or_else(Rat::zero);
                let y = b.coeffs.get(i).cloned().unwrap_or_else(Rat::zero);
                x - y
            })
            .collect(),
    )
}

/// Sign of the integer polynomial at `x`, computed from the homogenized form
/// `sum c_i num^i den^{d-i}` (`den > 0`).
fn sign_at(poly: &[BigInt], x: &Rat) -> i32 {
    if poly.is_empty() {
        return 0;
    }
    let (num, den) = (x.numer(), x.denom());
    let mut acc = BigInt::zero();
    let mut den_pow = BigInt::one();
    // Horner in num with den powers accumulated from the top.
    for c in poly.iter().rev() {
        acc = acc * num + c * &den_pow;
        den_pow *= den;
    }
    if acc.is_positive() {
        1
    } else if acc.is_negative() {
        -1
    } else {
        0
    }
}

/// Sturm chain of a square-free polynomial, stored as primitive integer polynomials.
#[derive(Debug, Clone)]
pub struct SturmChain {
    chain: Vec<Vec<BigInt>>,
}

impl SturmChain {
    pub fn new(f: &RatPoly) -> Self {
        let mut chain = vec![f.to_primitive_int(), f.derivative().to_primitive_int()];
        loop {
            let (prev, cur) = (&chain[chain.len() - 2], &chain[chain.len() - 1]);
            if cur.len() <= 1 {
                break;
            }
            let mut r = pseudo_rem(prev, cur);
            if r.is_empty() {
                break;
            }
            // pseudo_rem scales by lc^(deg prev - deg cur + 1); keep the true remainder's sign
            let odd_power = (prev.len() - cur.len() + 1) % 2 == 1;
            let keep_sign = !(odd_power && cur.last().unwrap().is_negative());
            if keep_sign {
                r = r.into_iter().map(|c| -c).collect();
            }
            chain.push(primitive(r));
        }
        SturmChain { chain }
    }

    fn sign_changes(&self, x: &Rat) -> usize {
        let mut last = 0;
        let mut changes = 0;
        for p in &self.chain {
            let s = sign_at(p, x);
            if s != 0 {
                if last != 0 && s != last {
                    changes += 1;
                }
                last = s;
            }
        }
        changes
    }

    /// Number of distinct roots in `(a, b]`, for `a`, `b` not roots.
    pub fn count(&self, a: &Rat, b: &Rat) -> usize {
        self.sign_changes(a) - self.sign_changes(b)
    }

    fn poly(&self) -> &[BigInt] {
        &self.chain[0]
    }
}

/// An isolating interval `[lo, hi]` holding exactly one root; `lo == hi` when the
/// root was hit exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: Rat,
    pub hi: Rat,
}

impl RootInterval {
    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rat {
        (&self.lo + &self.hi) / Rat::from_integer(BigInt::from(2))
    }
}

/// Power of two above Fujiwara's bound `2 max_i |a_(n-i) / a_n|^(1/i)`; every root
/// lies strictly inside `(-bound, bound)`.
fn root_bound(f: &RatPoly) -> Rat {
    let ints = f.to_primitive_int();
    let n = ints.len() - 1;
    let lead_bits = ints[n].bits() as i64;
    let mut exp = 0i64;
    for i in 1..=n {
        let c = &ints[n - i];
        if c.is_zero() {
            continue;
        }
        // |c / a_n| < 2^e
        let e = c.bits() as i64 - lead_bits + 1;
        exp = exp.max(Integer::div_ceil(&e, &(i as i64)));
    }
    let one = Rat::one();
    let two = Rat::from_integer(BigInt::from(2));
    (0..=exp).fold(one, |acc, _| acc * &two)
}

fn nonroot_midpoint(poly: &[BigInt], lo: &Rat, hi: &Rat) -> Rat {
    let two = Rat::from_integer(BigInt::from(2));
    let mut mid = (lo + hi) / &two;
    let mut step = (hi - lo) / Rat::from_integer(BigInt::from(1024));
    while sign_at(poly, &mid) == 0 {
        mid += &step;
        step = step / &two;
    }
    mid
}

/// Isolates every real root of a square-free polynomial, in increasing order.
pub fn isolate_real_roots(f: &RatPoly) -> Vec<RootInterval> {
    if f.degree() == 0 {
        return Vec::new();
    }
    let sturm = SturmChain::new(f);
    let b = root_bound(f);
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        match sturm.count(&lo, &hi) {
            0 => {}
            1 => out.push(RootInterval { lo, hi }),
            _ => {
                let mid = nonroot_midpoint(sturm.poly(), &lo, &hi);
                stack.push((mid.clone(), hi));
                stack.push((lo, mid));
            }
        }
    }
    out.sort_by(|a, b| a.lo.cmp(&b.lo));
    out
}

/// Bisects an isolating interval of a simple root until its width is at most `width`.
pub fn refine_root(f: &RatPoly, interval: &RootInterval, width: &Rat) -> RootInterval {
    let poly = f.to_primitive_int();
    let two = Rat::from_integer(BigInt::from(2));
    let mut lo = interval.lo.clone();
    let mut hi = interval.hi.clone();
    let s_lo = sign_at(&poly, &lo);
    while &(&hi - &lo) > width {
        let mid = (&lo + &hi) / &two;
        let s = sign_at(&poly, &mid);
        if s == 0 {
            return RootInterval { lo: mid.clone(), hi: mid };
        }
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    RootInterval { lo, hi }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::{rat, rat_to_f64};

    fn poly(c: &[i64]) -> RatPoly {
        RatPoly::from_ints(&c.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>())
    }

    #[test]
    fn isolates_and_refines() {
        // (x + 2)(2x + 1)(x - 1)(2x - 3)
        let mut g = poly(&[1]);
        for f in [[2, 1], [1, 2], [-1, 1], [-3, 2]] {
            g = mul(&g, &poly(&f));
        }
        let roots = isolate_real_roots(&g);
        assert_eq!(roots.len(), 4);
        for (r, want) in roots.iter().zip([-2.0, -0.5, 1.0, 1.5]) {
            let x = rat_to_f64(&refine_root(&g, r, &rat(1, 1 << 40)).midpoint());
            assert!((x - want).abs() < 1e-11, "{x} vs {want}");
        }
    }

    #[test]
    fn counts_irrational_roots() {
        // x^2 - 2 and x^3 - 3x + 1 (three real roots)
        let roots = isolate_real_roots(&poly(&[-2, 0, 1]));
        assert_eq!(roots.len(), 2);
        let r = refine_root(&poly(&[-2, 0, 1]), &roots[1], &rat(1, 1 << 50));
        assert!((rat_to_f64(&r.midpoint()) - 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(isolate_real_roots(&poly(&[1, -3, 0, 1])).len(), 3);
        assert_eq!(isolate_real_roots(&poly(&[1, 0, 1])).len(), 0);
    }

    #[test]
    fn squarefree_decomposition() {
        // (x - 1)^2 (x + 2)^3 (x - 5)
        let mut p = poly(&[1]);
        for (root, mult) in [(1, 2), (-2, 3), (5, 1)] {
            for _ in 0..mult {
                p = mul(&p, &poly(&[-root, 1]));
            }
        }
        let mut factors: Vec<(i64, usize)> = p
            .squarefree_factors()
            .into_iter()
            .flat_map(|(f, m)| {
                isolate_real_roots(&f)
                    .into_iter()
                    .map(move |r| (rat_to_f64(&refine_root(&f, &r, &rat(1, 1 << 30)).midpoint()).round() as i64, m))
                    .collect::<Vec<_>>()
            })
            .collect();
        factors.sort();
        assert_eq!(factors, vec![(-2, 3), (1, 2), (5, 1)]);
    }

    fn mul(a: &RatPoly, b: &RatPoly) -> RatPoly {
        let mut out = vec![Rat::zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            for (j, y) in b.coeffs.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        RatPoly::new(out)
    }
}
