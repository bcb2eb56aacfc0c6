//! Dense square matrices over the integers.

use std::ops::{Add, Mul, Sub};

use num_traits::{One, Zero};

use crate::exact_arith::{BigInt, Rat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    size: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(size: usize) -> Self {
        IntMatrix { size, data: vec![BigInt::zero(); size * size] }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size);
        for i in 0..size {
            m.data[i * size + i] = BigInt::one();
        }
        m
    }

    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut data = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                data.push(f(i, j));
            }
        }
        IntMatrix { size, data }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.size + j]
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.data.chunks(self.size.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn trace(&self) -> BigInt {
        (0..self.size).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn scaled(&self, c: &BigInt) -> Self {
        IntMatrix { size: self.size, data: self.data.iter().map(|x| x * c).collect() }
    }

    /// Characteristic polynomial `det(xI - A)`, coefficients in increasing degree.
    ///
    /// Faddeev-LeVerrier: `M_1 = I`, `c_{n-j} = -tr(A M_j) / j`,
    /// `M_{j+1} = A M_j + c_{n-j} I`. Every division is exact over the integers.
    pub fn charpoly(&self) -> Vec<BigInt> {
        let n = self.size;
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[n] = BigInt::one();
        let mut m = IntMatrix::identity(n);
        for j in 1..=n {
            let am = self * &m;
            let c = -am.trace() / BigInt::from(j);
            coeffs[n - j] = c.clone();
            m = &am + &IntMatrix::identity(n).scaled(&c);
        }
        coeffs
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        (0..self.size)
            .map(|i| (0..self.size).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.size).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = IntMatrix::identity(self.size);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

/// Solves the square system `a x = b` over Q; `None` when `a` is singular.
pub fn solve_rational(mut a: Vec<Vec<Rat>>, mut b: Vec<Rat>) -> Option<Vec<Rat>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &a[col][col];
            for c in col..n {
                let t = &f * &a[col][c];
                a[r][c] -= t;
            }
            let t = &f * &b[col];
            b[r] -= t;
        }
    }
    let mut x = vec![Rat::zero(); n];
    for r in (0..n).rev() {
        let mut acc = b[r].clone();
        for c in r + 1..n {
            acc -= &a[r][c] * &x[c];
        }
        x[r] = acc / &a[r][r];
    }
    Some(x)
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.size, rhs.size);
        let n = self.size;
        IntMatrix::from_fn(n, |i, j| {
            (0..n).map(|l| self.get(i, l) * rhs.get(l, j)).sum()
        })
    }
}

impl Add for &IntMatrix {
    type Output = IntMatrix;
    fn add(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.size, rhs.size);
        IntMatrix { size: self.size, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &IntMatrix {
    type Output = IntMatrix;
    fn sub(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.size, rhs.size);
        IntMatrix { size: self.size, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_fn(rows.len(), |i, j| BigInt::from(rows[i][j]))
    }

    #[test]
    fn charpoly_small() {
        let a = mat(&[&[2, 1], &[1, 3]]);
        let expected: Vec<BigInt> = [5, -5, 1].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(a.charpoly(), expected);
        let b = mat(&[&[1, 2, 0], &[0, 1, 4], &[3, 0, 1]]);
        // det(xI - B) = (x-1)^3 - 24
        let expected: Vec<BigInt> = [-25, 3, -3, 1].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(b.charpoly(), expected);
    }

    #[test]
    fn solves_small_system() {
        let r = |x: i64| Rat::from_integer(BigInt::from(x));
        let a = vec![vec![r(0), r(2)], vec![r(3), r(1)]];
        let x = solve_rational(a, vec![r(4), r(5)]).unwrap();
        assert_eq!(x, vec![r(1), r(2)]);
        assert!(solve_rational(vec![vec![r(1), r(2)], vec![r(2), r(4)]], vec![r(1), r(1)]).is_none());
    }

    #[test]
    fn cayley_hamilton() {
        let a = mat(&[&[4, -2, 7], &[1, 0, 3], &[-5, 6, 2]]);
        let cp = a.charpoly();
        let mut acc = IntMatrix::zeros(3);
        for (i, c) in cp.iter().enumerate() {
            acc = &acc + &a.pow(i as u32).scaled(c);
        }
        assert_eq!(acc, IntMatrix::zeros(3));
    }
}
