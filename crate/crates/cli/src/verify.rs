//! Cross-checks run by `hecke verify`. Each check compares two independent routes to
//! the same number.

use hecke_core::chebyshev_moments::{chebyshev, moment_vector};
use hecke_core::eichler_selberg::{dimension, trace, TraceRequest};
use hecke_core::exact_arith::{rat_to_f64, BigInt};
use hecke_core::level_one_oracle::{eigen_table, LevelOneSpace, DEFAULT_SEED};
use hecke_core::sato_tate_measure::{chebyshev_moment_of_measure, integrate_against, MeasureSpec};
use hecke_core::Result;

pub(crate) struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub(crate) fn run_checks() -> Vec<Check> {
    let checks: [(&'static str, fn() -> Result<Option<String>>); 6] = [
        ("ramanujan_tau", tau_product),
        ("level_one_matrices", level_one_matrices),
        ("curve_11a_point_counts", curve_11a),
        ("dimension_vs_identity_trace", dimension_vs_identity),
        ("measure_quadrature", measure_quadrature),
        ("eigenvalue_moments", eigenvalue_moments),
    ];
    checks
        .into_iter()
        .map(|(name, f)| {
            let (passed, detail) = match f() {
                Ok(None) => (true, "ok".to_string()),
                Ok(Some(why)) => (false, why),
                Err(e) => (false, format!("error: {e}")),
            };
            Check { name, passed, detail }
        })
        .collect()
}

fn total(n: u64, level: u64, weight: u32) -> Result<BigInt> {
    Ok(trace(&TraceRequest::new(n, level, weight)?)?.total)
}

/// tau(n) from `q prod (1 - q^n)^24`.
fn tau_product() -> Result<Option<String>> {
    const N: usize = 30;
    let mut c = vec![0i128; N + 1];
    c[1] = 1;
    for n in 1..=N {
        for _ in 0..24 {
            for i in (n..=N).rev() {
                c[i] -= c[i - n];
            }
        }
    }
    for (n, &want) in c.iter().enumerate().skip(1) {
        let got = total(n as u64, 1, 12)?;
        if got != BigInt::from(want) {
            return Ok(Some(format!("tau({n}): trace formula {got}, product {want}")));
        }
    }
    Ok(None)
}

fn level_one_matrices() -> Result<Option<String>> {
    for k in (12..=40u32).step_by(2).filter(|&k| k != 14) {
        let space = LevelOneSpace::new(k, 12)?;
        for n in [2u64, 3, 4, 5, 6, 12] {
            let (m, f) = (space.hecke(n)?.trace(), total(n, 1, k)?);
            if m != f {
                return Ok(Some(format!("k = {k}, n = {n}: matrix {m}, formula {f}")));
            }
        }
    }
    Ok(None)
}

/// `a_p = p - #E(F_p)` on the affine model `y^2 + y = x^3 - x^2 - 10x - 20`.
fn curve_11a() -> Result<Option<String>> {
    for p in [2u64, 3, 5, 7, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let pi = p as i64;
        let mut affine = 0i64;
        for x in 0..pi {
            let rhs = (x * x * x - x * x - 10 * x - 20).rem_euclid(pi);
            affine += (0..pi).filter(|y| (y * y + y).rem_euclid(pi) == rhs).count() as i64;
        }
        let a_p = pi - affine;
        let got = total(p, 11, 2)?;
        if got != BigInt::from(a_p) {
            return Ok(Some(format!("p = {p}: trace {got}, point count {a_p}")));
        }
    }
    Ok(None)
}

fn dimension_vs_identity() -> Result<Option<String>> {
    for level in [1u64, 2, 3, 4, 11, 23, 36, 100] {
        for k in (2..=24u32).step_by(2) {
            let d = dimension(level, k)?;
            if total(1, level, k)? != BigInt::from(d) {
                return Ok(Some(format!("N = {level}, k = {k}")));
            }
        }
    }
    Ok(None)
}

fn measure_quadrature() -> Result<Option<String>> {
    for p in [2u64, 3, 5, 7, 101] {
        for m in 0..=8u32 {
            let x_m = chebyshev(m as usize);
            let quad = integrate_against(MeasureSpec::prime(p)?, |x| x_m.eval(x), -2.0, 2.0)?;
            let exact = rat_to_f64(&chebyshev_moment_of_measure(p, m)?);
            if (quad - exact).abs() > 1e-9 {
                return Ok(Some(format!("p = {p}, m = {m}: quadrature {quad}, exact {exact}")));
            }
        }
    }
    Ok(None)
}

fn eigenvalue_moments() -> Result<Option<String>> {
    for k in [24u32, 36, 48] {
        for p in [2u64, 3] {
            let t = eigen_table(k, &[p], DEFAULT_SEED)?;
            for (m, want) in moment_vector(p, 1, k, 6)?.floats().into_iter().enumerate() {
                let x_m = chebyshev(m);
                let got: f64 = t.rows.iter().map(|r| x_m.eval(r.normalized[0])).sum();
                if (got - want).abs() > 1e-9 {
                    return Ok(Some(format!("k = {k}, p = {p}, m = {m}: eigenvalues {got}, traces {want}")));
                }
            }
        }
    }
    Ok(None)
}
