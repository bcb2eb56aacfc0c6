//! Truncated q-expansions with tracked precision.

use std::ops::Index;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact_arith::BigInt;

/// Power series `sum a_n q^n` known for `0 <= n < precision`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    coeffs: Vec<BigInt>,
}

impl QSeries {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        QSeries { coeffs }
    }

    pub fn one(precision: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); precision];
        if precision > 0 {
            coeffs[0] = BigInt::one();
        }
        QSeries { coeffs }
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `q^n`, or an error if `n` is beyond the known terms.
    pub fn coeff(&self, n: usize) -> Result<&BigInt> {
        self.coeffs
            .get(n)
            .ok_or(Error::InsufficientPrecision { have: self.precision(), need: n + 1 })
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Product; the result is known to the smaller of the two precisions.
    pub fn mul(&self, other: &QSeries) -> QSeries {
        let prec = self.precision().min(other.precision());
        let mut out = vec![BigInt::zero(); prec];
        for (i, a) in self.coeffs.iter().take(prec).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(prec - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        QSeries { coeffs: out }
    }

    pub fn pow(&self, mut e: u32) -> QSeries {
        let mut base = self.clone();
        let mut acc = QSeries::one(self.precision());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `self - c * other` over the common precision.
    pub fn sub_scaled(&self, c: &BigInt, other: &QSeries) -> QSeries {
        let prec = self.precision().min(other.precision());
        QSeries {
            coeffs: (0..prec).map(|i| &self.coeffs[i] - c * &other.coeffs[i]).collect(),
        }
    }
}

impl Index<usize> for QSeries {
    type Output = BigInt;

    fn index(&self, n: usize) -> &BigInt {
        &self.coeffs[n]
    }
}

fn divisor_power_sums(precision: usize, power: u32) -> Vec<BigInt> {
    let mut sums = vec![BigInt::zero(); precision];
    for d in 1..precision {
        let dp = BigInt::from(d).pow(power);
        for m in (d..precision).step_by(d) {
            sums[m] += &dp;
        }
    }
    sums
}

fn eisenstein(precision: usize, power: u32, factor: i64) -> QSeries {
    let mut coeffs: Vec<BigInt> = divisor_power_sums(precision, power)
        .into_iter()
        .map(|s| s * factor)
        .collect();
    if precision > 0 {
        coeffs[0] = BigInt::one();
    }
    QSeries { coeffs }
}

/// `E_4 = 1 + 240 sum sigma_3(n) q^n`.
pub fn e4(precision: usize) -> QSeries {
    eisenstein(precision, 3, 240)
}

/// `E_6 = 1 - 504 sum sigma_5(n) q^n`.
pub fn e6(precision: usize) -> QSeries {
    eisenstein(precision, 5, -504)
}

/// `Delta = (E_4^3 - E_6^2) / 1728`.
pub fn delta(precision: usize) -> QSeries {
    let diff = e4(precision).pow(3).sub_scaled(&BigInt::one(), &e6(precision).pow(2));
    QSeries { coeffs: diff.coeffs.into_iter().map(|c| c / 1728).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `q prod (1 - q^m)^24`, expanded directly.
    fn delta_product(precision: usize) -> Vec<BigInt> {
        let mut series = vec![BigInt::zero(); precision];
        series[1] = BigInt::one();
        for m in 1..precision {
            for _ in 0..24 {
                for i in (m..precision).rev() {
                    let t = series[i - m].clone();
                    series[i] -= t;
                }
            }
        }
        series
    }

    #[test]
    fn delta_matches_product() {
        let d = delta(40);
        assert_eq!(d.coefficients(), delta_product(40).as_slice());
        let tau: Vec<i64> = (1..6).map(|n| i64::try_from(&d[n]).unwrap()).collect();
        assert_eq!(tau, vec![1, -24, 252, -1472, 4830]);
    }

    #[test]
    fn precision_is_checked() {
        let d = delta(10);
        assert!(d.coeff(9).is_ok());
        assert_eq!(d.coeff(10), Err(Error::InsufficientPrecision { have: 10, need: 11 }));
        assert_eq!(d.mul(&e4(5)).precision(), 5);
    }

    #[test]
    fn e4_squared_is_e8() {
        let e8 = eisenstein(30, 7, 480);
        assert_eq!(e4(30).pow(2), e8);
    }
}
