//! Box counts, discrepancies, the multidimensional Erdős–Turán bound, and the
//! rate sweep over weights.
//!
//! Angles follow the normalized convention `x = theta / (2 pi)` in `[0, 1/2]`, so
//! `cos(2 pi m x) = cos(m theta)` and box widths are measured in `x`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::chebyshev_moments::cosine_moment_sum;
use crate::eichler_selberg::dimension;
use crate::error::{Error, Result};
use crate::exact_arith::{rat_to_f64, validate_primes};
use crate::level_one_oracle::{eigen_table, EigenTable};
use crate::sato_tate_measure::{box_measure, normalized_angle_sup, weyl_limit, JointBox};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub weight: u32,
    pub level: u64,
    pub primes: Vec<u64>,
    pub r#box: JointBox,
    /// `s(N, k)`, the number of points counted against.
    pub size: usize,
    pub count: usize,
    pub expected: f64,
    pub discrepancy: f64,
    pub rate_predictor: f64,
}

impl DiscrepancyReport {
    /// `D_I / s`.
    pub fn relative(&self) -> f64 {
        self.discrepancy / self.size as f64
    }
}

/// `r log(p_1 ... p_r) / log(kN)`.
pub fn rate_predictor(primes: &[u64], weight: u32, level: u64) -> f64 {
    let log_p: f64 = primes.iter().map(|&p| (p as f64).ln()).sum();
    primes.len() as f64 * log_p / (weight as f64 * level as f64).ln()
}

/// `M = floor(log(kN) / log(p_1 ... p_r))`, at least 1.
pub fn choose_m(primes: &[u64], weight: u32, level: u64) -> u32 {
    let log_p: f64 = primes.iter().map(|&p| (p as f64).ln()).sum();
    (((weight as f64 * level as f64).ln() / log_p).floor() as u32).max(1)
}

pub fn box_count(table: &EigenTable, bx: &JointBox) -> Result<DiscrepancyReport> {
    if bx.dim() != table.primes.len() {
        return Err(Error::DimensionMismatch { expected: table.primes.len(), got: bx.dim() });
    }
    let count = table.rows.iter().filter(|r| bx.contains(&r.normalized)).count();
    let expected = table.len() as f64 * box_measure(bx, &table.primes)?;
    Ok(DiscrepancyReport {
        weight: table.weight,
        level: 1,
        primes: table.primes.clone(),
        r#box: bx.clone(),
        size: table.len(),
        count,
        expected,
        discrepancy: (count as f64 - expected).abs(),
        rate_predictor: rate_predictor(&table.primes, table.weight, 1),
    })
}

/// `(2 pi)^r prod_t min(1 / (pi |m_t|), beta_t - alpha_t) + 2 / (M + 1)`, with widths
/// in normalized-angle units.
pub fn weight_w(m: &[i64], widths: &[f64], big_m: u32) -> f64 {
    let prod: f64 = m
        .iter()
        .zip(widths)
        .map(|(&mt, &w)| if mt == 0 { w } else { (1.0 / (PI * mt.unsigned_abs() as f64)).min(w) })
        .product();
    (2.0 * PI).powi(m.len() as i32) * prod + 2.0 / (big_m as f64 + 1.0)
}

/// Inputs of the Erdős–Turán bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EtBoundInput {
    pub v: usize,
    pub big_m: u32,
    /// `single[t][m - 1] = Delta_t(m, V)` for `1 <= m <= M`.
    pub single: Vec<Vec<f64>>,
    /// `Delta(m, V)` for every `m in [-M, M]^r`.
    pub joint: Vec<(Vec<i64>, f64)>,
    /// Box widths `beta_t - alpha_t` in normalized-angle units.
    pub widths: Vec<f64>,
    /// `||F_t||_inf` per axis.
    pub sups: Vec<f64>,
}

impl EtBoundInput {
    pub fn dim(&self) -> usize {
        self.widths.len()
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.dim();
        if self.big_m == 0 {
            return Err(Error::ZeroArgument("M"));
        }
        for len in [self.single.len(), self.sups.len()] {
            if len != r {
                return Err(Error::DimensionMismatch { expected: r, got: len });
            }
        }
        let expected_terms = (2 * self.big_m as usize + 1).pow(r as u32);
        if self.joint.len() != expected_terms {
            return Err(Error::DimensionMismatch { expected: expected_terms, got: self.joint.len() });
        }
        let negative = self
            .single
            .iter()
            .flatten()
            .chain(self.joint.iter().map(|(_, d)| d))
            .any(|&d| d < 0.0 || d.is_nan());
        if negative {
            return Err(Error::InvalidBox("deviations must be nonnegative".into()));
        }
        Ok(())
    }

    /// `max_t ||F_t|| + prod_t ||F_t||`.
    pub fn f_norm(&self) -> f64 {
        self.sups.iter().cloned().fold(0.0, f64::max) + self.sups.iter().product::<f64>()
    }
}

/// The right-hand side of the Erdős–Turán inequality, evaluated term by term:
/// `sum_m w(m) Delta(m, V) + 10 (2/(M+1)) sum_{m<=M} max_t Delta_t(m, V) + 12 ||F|| 2V/(M+1)`.
pub fn et_bound(input: &EtBoundInput) -> f64 {
    let m1 = input.big_m as f64 + 1.0;
    let first: f64 = input
        .joint
        .iter()
        .map(|(m, d)| weight_w(m, &input.widths, input.big_m) * d)
        .sum();
    let second: f64 = (0..input.big_m as usize)
        .map(|i| input.single.iter().map(|s| s[i]).fold(0.0, f64::max))
        .sum();
    first + 10.0 * 2.0 / m1 * second + 12.0 * input.f_norm() * 2.0 * input.v as f64 / m1
}

/// Every `m in [-M, M]^r` in lexicographic order.
fn index_vectors(r: usize, big_m: u32) -> Vec<Vec<i64>> {
    let m = big_m as i64;
    (0..r).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|v| {
                (-m..=m).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect()
    })
}

/// Erdős–Turán inputs computed from an eigenvalue table.
///
/// `Delta_t(m, V) = |sum_n cos(m theta_t^(n)) - V c_m|`. The joint deviation is the
/// bare sum `|sum_n prod_t cos(m_t theta_t^(n))|` when `centered` is false, and has
/// `V prod_t c_{m_t}` subtracted inside the absolute value when it is true.
pub fn et_input_from_table(table: &EigenTable, bx: &JointBox, big_m: u32, centered: bool) -> Result<EtBoundInput> {
    let r = table.primes.len();
    if bx.dim() != r {
        return Err(Error::DimensionMismatch { expected: r, got: bx.dim() });
    }
    if big_m == 0 {
        return Err(Error::ZeroArgument("M"));
    }
    let v = table.len();
    let weyl = |p: u64, m: i64| -> Result<f64> { Ok(rat_to_f64(&weyl_limit(p, m.unsigned_abs() as u32)?.value)) };

    let mut single = Vec::with_capacity(r);
    for (t, &p) in table.primes.iter().enumerate() {
        let mut row = Vec::with_capacity(big_m as usize);
        for m in 1..=big_m as i64 {
            let sum: f64 = table.rows.iter().map(|row| (m as f64 * row.angles[t]).cos()).sum();
            row.push((sum - v as f64 * weyl(p, m)?).abs());
        }
        single.push(row);
    }

    let mut joint = Vec::new();
    for m in index_vectors(r, big_m) {
        let sum: f64 = table
            .rows
            .iter()
            .map(|row| m.iter().zip(&row.angles).map(|(&mt, th)| (mt as f64 * th).cos()).product::<f64>())
            .sum();
        let center = if centered {
            let mut c = v as f64;
            for (&mt, &p) in m.iter().zip(&table.primes) {
                c *= weyl(p, mt)?;
            }
            c
        } else {
            0.0
        };
        joint.push((m, (sum - center).abs()));
    }

    let widths = bx.angle_intervals().iter().map(|(a, b)| b - a).collect();
    let sups = table.primes.iter().map(|&p| normalized_angle_sup(p)).collect();
    Ok(EtBoundInput { v, big_m, single, joint, widths, sups })
}

/// `|sum_n cos(m theta_n(p)) - s(N, k) c_m|` from the trace formula.
pub fn moment_deviation(p: u64, m: u32, level: u64, weight: u32) -> Result<f64> {
    let s = dimension(level, weight)? as f64;
    if m == 0 {
        // validates the arguments; both sides equal s
        cosine_moment_sum(p, 1, level, weight)?;
        return Ok(0.0);
    }
    let sum = cosine_moment_sum(p, m, level, weight)?.to_f64();
    Ok((0.5 * sum - s * rat_to_f64(&weyl_limit(p, m)?.value)).abs())
}

/// One weight of a rate sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRow {
    pub report: DiscrepancyReport,
    pub big_m: u32,
    /// `D_I / (s * rate_predictor)`.
    pub ratio: f64,
}

/// Box discrepancies at level 1 across `weights`; weights with `s(1, k) = 0` are skipped.
pub fn rate_sweep(weights: &[u32], primes: &[u64], bx: &JointBox, seed: u64) -> Result<Vec<RateRow>> {
    validate_primes(primes)?;
    if bx.dim() != primes.len() {
        return Err(Error::DimensionMismatch { expected: primes.len(), got: bx.dim() });
    }
    let rows: Vec<Option<RateRow>> = weights
        .par_iter()
        .map(|&k| {
            if dimension(1, k)? == 0 {
                return Ok(None);
            }
            let report = box_count(&eigen_table(k, primes, seed)?, bx)?;
            let ratio = report.discrepancy / (report.size as f64 * report.rate_predictor);
            Ok(Some(RateRow { big_m: choose_m(primes, k, 1), report, ratio }))
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// The `n^r` boxes of an equal-width grid with `n` cells per axis of `[-2, 2]`.
pub fn grid_boxes(r: usize, n: usize) -> Vec<JointBox> {
    let edge = |i: usize| (4.0 * i as f64 - 2.0 * n as f64) / n as f64;
    let cells: Vec<(f64, f64)> = (0..n).map(|i| (edge(i), edge(i + 1))).collect();
    let mut boxes: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
    for _ in 0..r {
        boxes = boxes
            .into_iter()
            .flat_map(|v| {
                cells.iter().map(move |&c| {
                    let mut w = v.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
    }
    boxes
        .into_iter()
        .map(|iv| JointBox::new(iv).expect("grid cells lie in [-2, 2]"))
        .collect()
}

/// Nine boxes in dimension `r`: nine cells on the line, or the `3 x 3` grid in the plane.
pub fn nine_box_grid(r: usize) -> Vec<JointBox> {
    match r {
        1 => grid_boxes(1, 9),
        _ => grid_boxes(r, 3),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::level_one_oracle::{EigenRow, DEFAULT_SEED};

    fn table(k: u32, primes: &[u64]) -> EigenTable {
        eigen_table(k, primes, DEFAULT_SEED).unwrap()
    }

    #[test]
    fn box_count_examples() {
        let t = table(12, &[2]);
        let full = box_count(&t, &JointBox::full(1)).unwrap();
        assert_eq!(full.count, 1);
        assert!(full.discrepancy < 1e-10);

        let r = box_count(&t, &JointBox::new(vec![(0.0, 2.0)]).unwrap()).unwrap();
        assert_eq!(r.count, 0);
        assert!((r.expected - 0.5).abs() < 1e-10);
        assert!((r.discrepancy - 0.5).abs() < 1e-10);

        let r = box_count(&table(24, &[2]), &JointBox::new(vec![(-2.0, 0.0)]).unwrap()).unwrap();
        assert_eq!(r.count, 1);
        assert!(r.discrepancy < 1e-10);

        assert!(matches!(box_count(&t, &JointBox::full(2)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn weight_examples() {
        assert!((weight_w(&[1], &[0.5], 9) - 2.2).abs() < 1e-12);
        let m = 1000;
        assert!((weight_w(&[m], &[0.5], 9) - (2.0 / m as f64 + 0.2)).abs() < 1e-12);
        assert!((weight_w(&[1, 1], &[1.0, 1.0], 9) - 4.2).abs() < 1e-12);
        assert!((weight_w(&[-3, 0], &[1.0, 0.25], 1) - (2.0 * PI).powi(2) * 0.25 / (3.0 * PI) - 1.0).abs() < 1e-12);
    }

    fn zero_input(v: usize, big_m: u32, sup: f64) -> EtBoundInput {
        EtBoundInput {
            v,
            big_m,
            single: vec![vec![0.0; big_m as usize]],
            joint: index_vectors(1, big_m).into_iter().map(|m| (m, 0.0)).collect(),
            widths: vec![0.5],
            sups: vec![sup],
        }
    }

    #[test]
    fn et_bound_examples() {
        // ||F|| = max + prod = 2 sup for r = 1
        let input = zero_input(100, 199, 0.5);
        assert!(input.validate().is_ok());
        assert!((et_bound(&input) - 12.0).abs() < 1e-12);
        let big = et_bound(&zero_input(100, 1_000_000, 0.5));
        assert!((big - 12.0 * 200.0 / 1_000_001.0).abs() < 1e-12);
        let mut bad = zero_input(10, 3, 1.0);
        bad.joint.pop();
        assert!(bad.validate().is_err());
    }

    #[test]
    fn et_bound_dominates_grid_at_weight_24() {
        let t = table(24, &[2]);
        let big_m = choose_m(&[2], 24, 1);
        assert_eq!(big_m, 4);
        for bx in nine_box_grid(1) {
            let d = box_count(&t, &bx).unwrap().discrepancy;
            let bound = et_bound(&et_input_from_table(&t, &bx, big_m, false).unwrap());
            assert!(d <= bound, "{bx:?}: {d} > {bound}");
        }
    }

    #[test]
    fn table_and_trace_deviations_agree() {
        for k in [24, 36, 48, 60] {
            let t = table(k, &[2]);
            let input = et_input_from_table(&t, &JointBox::full(1), 6, false).unwrap();
            for m in 1..=6u32 {
                let from_traces = moment_deviation(2, m, 1, k).unwrap();
                assert!((input.single[0][m as usize - 1] - from_traces).abs() < 1e-9, "k = {k}, m = {m}");
            }
        }
    }

    #[test]
    fn moment_deviation_examples() {
        assert_eq!(moment_deviation(2, 0, 1, 12).unwrap(), 0.0);
        assert!((moment_deviation(2, 1, 1, 12).unwrap() - 12.0 * 2f64.powf(-5.5)).abs() < 1e-12);
        assert!((moment_deviation(2, 2, 1, 12).unwrap() - 0.609375).abs() < 1e-12);
        assert!(matches!(moment_deviation(11, 1, 11, 2), Err(Error::NotCoprime { .. })));
    }

    #[test]
    fn reflection_invariance() {
        for k in [24, 36, 48, 60] {
            let t = table(k, &[2, 3]);
            let mut mirrored = t.clone();
            mirrored.rows = t
                .rows
                .iter()
                .map(|r| {
                    let normalized: Vec<f64> = r.normalized.iter().map(|a| -a).collect();
                    let angles = r.angles.iter().map(|th| PI - th).collect();
                    EigenRow { normalized, angles }
                })
                .collect();
            for bx in grid_boxes(2, 3).into_iter().chain([JointBox::new(vec![(-1.0, 0.5), (0.2, 1.7)]).unwrap()]) {
                let a = box_count(&t, &bx).unwrap();
                let b = box_count(&mirrored, &bx.reflected()).unwrap();
                assert_eq!(a.count, b.count);
                assert_eq!(a.discrepancy, b.discrepancy);
            }
        }
    }

    #[test]
    fn sweep_consistency() {
        let bx = JointBox::new(vec![(-1.0, 1.0)]).unwrap();
        let rows = rate_sweep(&[12, 14, 24], &[2], &bx, DEFAULT_SEED).unwrap();
        assert_eq!(rows.iter().map(|r| r.report.weight).collect::<Vec<_>>(), vec![12, 24]);
        assert_eq!(rows[1].report, box_count(&table(24, &[2]), &bx).unwrap());
        let full = rate_sweep(&[12, 24, 36], &[2], &JointBox::full(1), DEFAULT_SEED).unwrap();
        assert!(full.iter().all(|r| r.report.discrepancy < 1e-9));
    }

    #[test]
    fn grid_shapes() {
        assert_eq!(nine_box_grid(1).len(), 9);
        let plane = nine_box_grid(2);
        assert_eq!(plane.len(), 9);
        assert_eq!(plane[4].intervals(), &[(-2.0 / 3.0, 2.0 / 3.0); 2]);
        assert_eq!(index_vectors(2, 2).len(), 25);
    }
}
