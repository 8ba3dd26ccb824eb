//! Small dense matrices over the rationals: fraction-free leading minors and
//! exact Gauss–Jordan solves.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact_arith::Rational;

/// Square matrix with exact rational entries, stored row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct QMatrix {
    n: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(n: usize) -> Self {
        QMatrix {
            n,
            data: vec![Rational::zero(); n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("matrix is not square".into()));
        }
        Ok(QMatrix {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::from(x)).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        self.data.chunks(self.n.max(1)).map(<[_]>::to_vec).take(self.n).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn neg(&self) -> Self {
        QMatrix {
            n: self.n,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    /// Leading principal minors `det(A[..k, ..k])` for `k = 1..=n`.
    ///
    /// The matrix is scaled to an integer one and reduced by Bareiss'
    /// fraction-free elimination without pivoting; the `k`-th pivot is the
    /// `k`-th leading minor. Once a minor vanishes the remaining ones are
    /// computed directly from their own submatrix.
    pub fn leading_minors(&self) -> Vec<Rational> {
        let n = self.n;
        let scale = self
            .data
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let mut a: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let x = self.get(i, j);
                        x.numer() * (&scale / x.denom())
                    })
                    .collect()
            })
            .collect();
        let unscale = |m: BigInt, k: usize| {
            Rational::new(m, num_traits::pow(scale.clone(), k))
        };

        let mut minors = Vec::with_capacity(n);
        let mut prev = BigInt::one();
        for k in 0..n {
            let pivot = a[k][k].clone();
            minors.push(unscale(pivot.clone(), k + 1));
            if pivot.is_zero() {
                for size in k + 2..=n {
                    minors.push(unscale(bareiss_det(&a_prefix(self, &scale, size)), size));
                }
                return minors;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i][j] * &pivot - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
            }
            prev = pivot;
        }
        minors
    }

    pub fn determinant(&self) -> Rational {
        if self.n == 0 {
            return Rational::one();
        }
        let mut m = self.clone();
        let mut det = Rational::one();
        for k in 0..self.n {
            let Some(p) = (k..self.n).find(|&r| !m.get(r, k).is_zero()) else {
                return Rational::zero();
            };
            if p != k {
                m.swap_rows(p, k);
                det = -det;
            }
            let pivot = m.get(k, k).clone();
            det = det * &pivot;
            for i in k + 1..self.n {
                let f = m.get(i, k) / &pivot;
                if f.is_zero() {
                    continue;
                }
                for j in k..self.n {
                    let v = m.get(i, j) - &f * m.get(k, j);
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.n {
            self.data.swap(a * self.n + j, b * self.n + j);
        }
    }

    /// Solves `self * x = rhs`. Returns `None` for a singular matrix.
    pub fn solve(&self, rhs: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(rhs.len(), self.n);
        let inv = self.inverse()?;
        Some(inv.mul_vec(rhs))
    }

    /// Exact inverse by Gauss–Jordan elimination with row pivoting.
    pub fn inverse(&self) -> Option<QMatrix> {
        let n = self.n;
        let mut m = self.clone();
        let mut inv = QMatrix::zeros(n);
        for i in 0..n {
            inv.set(i, i, Rational::one());
        }
        for k in 0..n {
            let p = (k..n).find(|&r| !m.get(r, k).is_zero())?;
            if p != k {
                m.swap_rows(p, k);
                inv.swap_rows(p, k);
            }
            let pivot = m.get(k, k).recip();
            for j in 0..n {
                let v = m.get(k, j) * &pivot;
                m.set(k, j, v);
                let w = inv.get(k, j) * &pivot;
                inv.set(k, j, w);
            }
            for i in 0..n {
                if i == k || m.get(i, k).is_zero() {
                    continue;
                }
                let f = m.get(i, k).clone();
                for j in 0..n {
                    let v = m.get(i, j) - &f * m.get(k, j);
                    m.set(i, j, v);
                    let w = inv.get(i, j) - &f * inv.get(k, j);
                    inv.set(i, j, w);
                }
            }
        }
        Some(inv)
    }
}

fn a_prefix(m: &QMatrix, scale: &BigInt, size: usize) -> Vec<Vec<BigInt>> {
    (0..size)
        .map(|i| {
            (0..size)
                .map(|j| {
                    let x = m.get(i, j);
                    x.numer() * (scale / x.denom())
                })
                .collect()
        })
        .collect()
}

/// Bareiss determinant with row pivoting on an integer matrix.
fn bareiss_det(rows: &[Vec<BigInt>]) -> BigInt {
    let n = rows.len();
    let mut a = rows.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        BigInt::one()
    } else {
        sign * &a[n - 1][n - 1]
    }
}

/// True iff every leading principal minor of `-m` is positive.
pub fn is_negative_definite(m: &QMatrix) -> Result<bool> {
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    Ok(m.neg().leading_minors().iter().all(Rational::is_positive))
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}
