//! Hecke eigenvalues on `S_k(SL_2(Z))` computed directly from q-expansions.
//!
//! This is an oracle independent of the trace formula: a Victor Miller basis is built
//! from `E_4`, `E_6` and `Delta`, Hecke operators act on coefficients, and eigenvalues
//! are isolated as real roots of exact characteristic polynomials.

pub mod matrix;
pub mod poly;
pub mod qseries;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_arith::{big_pow, check_weight, divisors, gcd, rat_to_f64, validate_primes, BigInt, Rat};

pub use matrix::{solve_rational, IntMatrix};
pub use poly::{isolate_real_roots, refine_root, RatPoly, RootInterval};
pub use qseries::QSeries;

/// Seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x5eed_2024;

const MAX_DRAWS: usize = 16;

/// Dimension of `S_k(SL_2(Z))`.
pub fn cusp_dimension(k: u32) -> usize {
    if k % 2 == 1 || k < 12 {
        return 0;
    }
    let d = (k / 12) as usize;
    if k % 12 == 2 {
        d - 1
    } else {
        d
    }
}

/// Basis `f_1..f_d` of `S_k` with `a_i(f_j) = delta_ij` for `1 <= i <= d`.
pub fn victor_miller_basis(k: u32, precision: usize) -> Result<Vec<QSeries>> {
    check_weight(k)?;
    let d = cusp_dimension(k);
    if d == 0 {
        return Ok(Vec::new());
    }
    if precision < d + 1 {
        return Err(Error::InsufficientPrecision { have: precision, need: d + 1 });
    }
    // weight k - 12d in {0, 4, 6, 8, 10, 14} as E_4^a E_6^b
    let (a, b) = match k - 12 * d as u32 {
        0 => (0, 0),
        4 => (1, 0),
        6 => (0, 1),
        8 => (2, 0),
        10 => (1, 1),
        14 => (2, 1),
        r => unreachable!("residual weight {r}"),
    };
    let e4 = qseries::e4(precision);
    let delta = qseries::delta(precision);
    let base = e4.pow(a).mul(&qseries::e6(precision).pow(b));
    let e4_cubed = e4.pow(3);

    // f_j = Delta^j (E_4^3)^(d-j) E_4^a E_6^b has q-expansion q^j + O(q^(j+1))
    let mut basis: Vec<QSeries> = Vec::with_capacity(d);
    let mut delta_pow = delta.clone();
    for j in 1..=d {
        basis.push(delta_pow.mul(&e4_cubed.pow((d - j) as u32)).mul(&base));
        if j < d {
            delta_pow = delta_pow.mul(&delta);
        }
    }
    for j in (0..d).rev() {
        for i in 0..j {
            let c = basis[i][j + 1].clone();
            if !c.is_zero() {
                basis[i] = basis[i].sub_scaled(&c, &basis[j]);
            }
        }
    }
    Ok(basis)
}

/// Matrix of `T_n` on a Victor Miller basis: column `j` holds the first `d`
/// coefficients of `T_n f_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeckeMatrix {
    pub weight: u32,
    pub n: u64,
    pub matrix: IntMatrix,
}

impl HeckeMatrix {
    pub fn trace(&self) -> BigInt {
        self.matrix.trace()
    }

    pub fn charpoly(&self) -> Vec<BigInt> {
        self.matrix.charpoly()
    }
}

/// `a_m(T_n f) = sum_{e | gcd(m, n)} e^(k-1) a_(mn/e^2)(f)`.
pub fn hecke_matrix(k: u32, n: u64, basis: &[QSeries]) -> Result<HeckeMatrix> {
    check_weight(k)?;
    if n == 0 {
        return Err(Error::ZeroArgument("n"));
    }
    let d = basis.len();
    let need = n as usize * d + 1;
    if let Some(have) = basis.iter().map(QSeries::precision).min() {
        if have < need {
            return Err(Error::InsufficientPrecision { have, need });
        }
    }
    let mut terms: Vec<Vec<(usize, BigInt)>> = Vec::with_capacity(d);
    for m in 1..=d as u64 {
        let mut row = Vec::new();
        for e in divisors(gcd(m, n))? {
            row.push(((m * n / (e * e)) as usize, big_pow(e, k as u64 - 1)));
        }
        terms.push(row);
    }
    // precision was checked above, so every index is in range
    let matrix = IntMatrix::from_fn(d, |i, j| terms[i].iter().map(|(idx, w)| w * &basis[j][*idx]).sum());
    Ok(HeckeMatrix { weight: k, n, matrix })
}

/// A Victor Miller basis with enough precision for `T_n`, `n <= max_n`.
#[derive(Debug, Clone)]
pub struct LevelOneSpace {
    weight: u32,
    basis: Vec<QSeries>,
}

impl LevelOneSpace {
    pub fn new(weight: u32, max_n: u64) -> Result<Self> {
        let precision = max_n as usize * cusp_dimension(weight) + 1;
        let basis = victor_miller_basis(weight, precision)?;
        Ok(LevelOneSpace { weight, basis })
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[QSeries] {
        &self.basis
    }

    pub fn hecke(&self, n: u64) -> Result<HeckeMatrix> {
        hecke_matrix(self.weight, n, &self.basis)
    }
}

/// One eigenform's normalized eigenvalues `a(p_i) = lambda(p_i) / p_i^((k-1)/2)` and
/// angles `theta_i` with `a = 2 cos theta`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenRow {
    pub normalized: Vec<f64>,
    pub angles: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenTable {
    pub weight: u32,
    pub primes: Vec<u64>,
    pub seed: u64,
    /// Coefficients of the Hecke combination that separated the eigenforms (all 1 when
    /// a single prime was requested).
    pub combination: Vec<u64>,
    pub rows: Vec<EigenRow>,
}

impl EigenTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Normalized eigenvalues at the `i`-th prime across all rows.
    pub fn column(&self, i: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.normalized[i]).collect()
    }
}

/// `p^((k-2)/2)`, the exact part of the normalization `p^((k-1)/2)`.
fn half_scale(p: u64, k: u32) -> Rat {
    Rat::from_integer(big_pow(p, (k as u64 - 2) / 2))
}

/// Accuracy target for an unnormalized eigenvalue at `p`: `1e-14 p^((k-2)/2)`.
fn tolerance(p: u64, k: u32) -> Rat {
    half_scale(p, k) / Rat::from_integer(BigInt::from(10u64).pow(14))
}

fn normalize(lambda: &Rat, p: u64, k: u32) -> f64 {
    rat_to_f64(&(lambda / half_scale(p, k))) / (p as f64).sqrt()
}

fn make_row(normalized: Vec<f64>) -> EigenRow {
    let angles = normalized.iter().map(|a| (a / 2.0).clamp(-1.0, 1.0).acos()).collect();
    EigenRow { normalized, angles }
}

fn single_prime_rows(t: &HeckeMatrix, p: u64, k: u32) -> Vec<EigenRow> {
    let tol = tolerance(p, k);
    let cp = RatPoly::from_ints(&t.charpoly());
    let mut rows = Vec::new();
    for (factor, mult) in cp.squarefree_factors() {
        for root in isolate_real_roots(&factor) {
            let r = refine_root(&factor, &root, &tol);
            let a = normalize(&r.midpoint(), p, k);
            rows.extend(std::iter::repeat_with(|| make_row(vec![a])).take(mult));
        }
    }
    rows
}

/// Coefficients `x` with `target = sum_j x_j a^j`, found from a cyclic vector of `a`.
fn polynomial_in(a: &IntMatrix, target: &IntMatrix) -> Option<Vec<Rat>> {
    let d = a.size();
    let mut starts: Vec<Vec<BigInt>> = (0..d)
        .map(|c| (0..d).map(|i| BigInt::from((i == c) as u8)).collect())
        .collect();
    starts.push(vec![BigInt::one(); d]);
    for v in starts {
        let mut krylov = vec![v.clone()];
        for _ in 1..d {
            let next = a.mul_vec(krylov.last().unwrap());
            krylov.push(next);
        }
        let rows: Vec<Vec<Rat>> = (0..d)
            .map(|i| (0..d).map(|j| Rat::from_integer(krylov[j][i].clone())).collect())
            .collect();
        let rhs: Vec<Rat> = target.mul_vec(&v).into_iter().map(Rat::from_integer).collect();
        if let Some(x) = solve_rational(rows, rhs) {
            return Some(x);
        }
    }
    None
}

fn abs_max(r: &RootInterval) -> Rat {
    let (lo, hi) = (r.lo.abs(), r.hi.abs());
    if lo > hi {
        lo
    } else {
        hi
    }
}

/// `sum_j j |x_j| R^(j-1)`, a Lipschitz constant for the polynomial on `[-R, R]`.
fn lipschitz(coeffs: &[Rat], radius: &Rat) -> Rat {
    let mut acc = Rat::zero();
    let mut pow = Rat::one();
    for (j, c) in coeffs.iter().enumerate().skip(1) {
        acc += c.abs() * Rat::from_integer(BigInt::from(j)) * &pow;
        pow *= radius;
    }
    acc
}

fn eval(coeffs: &[Rat], x: &Rat) -> Rat {
    coeffs.iter().rev().fold(Rat::zero(), |acc, c| acc * x + c)
}

fn joint_rows(
    mats: &[HeckeMatrix],
    primes: &[u64],
    k: u32,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<u64>, Vec<EigenRow>)> {
    let d = mats[0].matrix.size();
    for _ in 0..MAX_DRAWS {
        let combination: Vec<u64> = primes.iter().map(|_| rng.gen_range(1..=1u64 << 16)).collect();
        let mut a = IntMatrix::zeros(d);
        for (c, t) in combination.iter().zip(mats) {
            a = &a + &t.matrix.scaled(&BigInt::from(*c));
        }
        let cp = RatPoly::from_ints(&a.charpoly());
        if cp.gcd(&cp.derivative()).degree() > 0 {
            continue;
        }
        let Some(polys) = mats
            .iter()
            .map(|t| polynomial_in(&a, &t.matrix))
            .collect::<Option<Vec<_>>>()
        else {
            continue;
        };
        let mut rows = Vec::with_capacity(d);
        for root in isolate_real_roots(&cp) {
            // shrink the bracket until every P_i varies by less than its tolerance on it
            let radius = abs_max(&root) + Rat::one();
            let mut width = root.width();
            for (poly, &p) in polys.iter().zip(primes) {
                let lip = lipschitz(poly, &radius);
                if !lip.is_zero() {
                    let w = tolerance(p, k) / lip;
                    if w < width {
                        width = w;
                    }
                }
            }
            let nu = refine_root(&cp, &root, &width).midpoint();
            let values = polys
                .iter()
                .zip(primes)
                .map(|(poly, &p)| normalize(&eval(poly, &nu), p, k))
                .collect();
            rows.push(make_row(values));
        }
        return Ok((combination, rows));
    }
    Err(Error::DegenerateCombination(MAX_DRAWS))
}

/// Joint normalized eigenvalues at `primes` over an eigenbasis of `S_k(SL_2(Z))`,
/// counted with multiplicity and sorted lexicographically.
pub fn eigen_table(k: u32, primes: &[u64], seed: u64) -> Result<EigenTable> {
    check_weight(k)?;
    validate_primes(primes)?;
    if primes.is_empty() {
        return Err(Error::InvalidPrimes("empty prime list".into()));
    }
    if cusp_dimension(k) == 0 {
        return Err(Error::EmptySpace(k));
    }
    let space = LevelOneSpace::new(k, *primes.iter().max().unwrap())?;
    let mats = primes.iter().map(|&p| space.hecke(p)).collect::<Result<Vec<_>>>()?;
    let (combination, mut rows) = if primes.len() == 1 {
        (vec![1], single_prime_rows(&mats[0], primes[0], k))
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        joint_rows(&mats, primes, k, &mut rng)?
    };
    rows.sort_by(|a, b| {
        a.normalized
            .iter()
            .zip(&b.normalized)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(EigenTable { weight: k, primes: primes.to_vec(), seed, combination, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eichler_selberg::{dimension, trace, TraceRequest};

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn basis_examples() {
        assert!(victor_miller_basis(14, 50).unwrap().is_empty());
        let b12 = victor_miller_basis(12, 6).unwrap();
        assert_eq!(b12.len(), 1);
        assert_eq!(b12[0].coefficients(), ints(&[0, 1, -24, 252, -1472, 4830]).as_slice());
        let b24 = victor_miller_basis(24, 10).unwrap();
        assert_eq!(b24.len(), 2);
        assert_eq!(&b24[0].coefficients()[..3], ints(&[0, 1, 0]).as_slice());
        assert_eq!(&b24[1].coefficients()[..3], ints(&[0, 0, 1]).as_slice());
        assert_eq!(
            victor_miller_basis(24, 2),
            Err(Error::InsufficientPrecision { have: 2, need: 3 })
        );
    }

    #[test]
    fn dimension_matches_trace_formula() {
        for k in (2..=120).step_by(2) {
            assert_eq!(cusp_dimension(k) as u64, dimension(1, k).unwrap(), "k = {k}");
        }
    }

    #[test]
    fn hecke_examples() {
        let s12 = LevelOneSpace::new(12, 3).unwrap();
        assert_eq!(s12.hecke(2).unwrap().matrix.rows(), vec![ints(&[-24])]);
        assert_eq!(s12.hecke(3).unwrap().matrix.rows(), vec![ints(&[252])]);
        let s24 = LevelOneSpace::new(24, 2).unwrap();
        assert_eq!(s24.hecke(2).unwrap().charpoly(), ints(&[-20468736, -1080, 1]));
        let short = victor_miller_basis(24, 4).unwrap();
        assert_eq!(
            hecke_matrix(24, 2, &short),
            Err(Error::InsufficientPrecision { have: 4, need: 5 })
        );
    }

    #[test]
    fn traces_match_trace_formula() {
        for k in (12..=60).step_by(2) {
            let space = LevelOneSpace::new(k, 13).unwrap();
            for p in [2, 3, 5, 7, 11, 13] {
                let expected = trace(&TraceRequest::new(p, 1, k).unwrap()).unwrap().total;
                assert_eq!(space.hecke(p).unwrap().trace(), expected, "k = {k}, p = {p}");
            }
        }
    }

    #[test]
    fn hecke_operators_commute() {
        for k in (12..=60).step_by(2) {
            let space = LevelOneSpace::new(k, 7).unwrap();
            let mats: Vec<IntMatrix> = [2, 3, 5, 7].iter().map(|&p| space.hecke(p).unwrap().matrix).collect();
            for a in &mats {
                for b in &mats {
                    assert_eq!(a * b, b * a, "k = {k}");
                }
            }
        }
    }

    #[test]
    fn prime_square_recursion() {
        for k in (12..=60).step_by(2) {
            let space = LevelOneSpace::new(k, 49).unwrap();
            for p in [2u64, 3, 5, 7] {
                let tp = space.hecke(p).unwrap().matrix;
                let id = IntMatrix::identity(space.dim()).scaled(&big_pow(p, k as u64 - 1));
                assert_eq!(space.hecke(p * p).unwrap().matrix, &(&tp * &tp) - &id, "k = {k}, p = {p}");
            }
        }
    }

    #[test]
    fn eigen_table_examples() {
        let t = eigen_table(12, &[2, 3], DEFAULT_SEED).unwrap();
        assert_eq!(t.len(), 1);
        let want = [-24.0 / 2f64.powf(5.5), 252.0 / 3f64.powf(5.5)];
        for (a, w) in t.rows[0].normalized.iter().zip(want) {
            assert!((a - w).abs() < 1e-12);
        }
        assert!((t.rows[0].normalized[0] + 0.530330).abs() < 1e-6);

        let t = eigen_table(24, &[2], DEFAULT_SEED).unwrap();
        let disc = 144169f64.sqrt();
        let scale = 2f64.powf(11.5);
        let want = [(540.0 - 12.0 * disc) / scale, (540.0 + 12.0 * disc) / scale];
        assert_eq!(t.len(), 2);
        for (row, w) in t.rows.iter().zip(want) {
            assert!((row.normalized[0] - w).abs() < 1e-12, "{:?} vs {w}", row.normalized);
            assert!((2.0 * row.angles[0].cos() - w).abs() < 1e-12);
        }
        assert_eq!(eigen_table(14, &[2], 0), Err(Error::EmptySpace(14)));
        assert!(matches!(eigen_table(12, &[2, 2], 0), Err(Error::InvalidPrimes(_))));
    }

    #[test]
    fn joint_rows_reproduce_single_prime_eigenvalues() {
        for k in [24, 36, 48, 60, 72] {
            let joint = eigen_table(k, &[2, 3, 5], DEFAULT_SEED).unwrap();
            for (i, &p) in [2u64, 3, 5].iter().enumerate() {
                let mut col = joint.column(i);
                col.sort_by(f64::total_cmp);
                let single = eigen_table(k, &[p], DEFAULT_SEED).unwrap().column(0);
                for (a, b) in col.iter().zip(&single) {
                    assert!((a - b).abs() < 1e-12, "k = {k}, p = {p}");
                }
            }
        }
    }

    #[test]
    fn deligne_bound() {
        for k in (12..=120).step_by(2) {
            if cusp_dimension(k) == 0 {
                continue;
            }
            let t = eigen_table(k, &[2, 3], DEFAULT_SEED).unwrap();
            assert_eq!(t.len(), cusp_dimension(k));
            assert!(t.rows.iter().flat_map(|r| &r.normalized).all(|a| a.abs() <= 2.0), "k = {k}");
        }
    }

    #[test]
    fn seed_is_deterministic() {
        let a = eigen_table(48, &[2, 3], 7).unwrap();
        let b = eigen_table(48, &[2, 3], 7).unwrap();
        assert_eq!(a, b);
    }
}
