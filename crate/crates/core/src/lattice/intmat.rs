//! Small dense integer matrices with overflow-checked arithmetic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major square integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct IntMatrix {
    n: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0; n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::domain("matrix rows must form a square array"));
        }
        Ok(Self {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// `max_ij |a_ij|`.
    pub fn max_abs(&self) -> i64 {
        self.data.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    /// `max |a_ij|` over rows `from..`.
    pub fn max_abs_rows_from(&self, from: usize) -> i64 {
        self.data[from * self.n..].iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc: i128 = 0;
                for l in 0..n {
                    acc += self.get(i, l) as i128 * other.get(l, j) as i128;
                }
                out.set(i, j, i64::try_from(acc).map_err(|_| Error::Overflow("matrix product".into()))?);
            }
        }
        Ok(out)
    }

    /// Determinant by fraction-free (Bareiss) elimination in i128.
    pub fn determinant(&self) -> Result<i64> {
        let d = bareiss_det(self.n, self.data.iter().map(|&x| x as i128).collect())?;
        i64::try_from(d).map_err(|_| Error::Overflow("determinant".into()))
    }

    /// Exact inverse of a unimodular matrix (adjugate divided by det = ±1).
    pub fn unimodular_inverse(&self) -> Result<Self> {
        let n = self.n;
        let det = self.determinant()?;
        if det.abs() != 1 {
            return Err(Error::certification("det(A) = ±1", format!("det = {det}")));
        }
        if n == 1 {
            return Ok(Self { n, data: vec![det] });
        }
        let mut inv = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                // inv[j][i] = (-1)^(i+j) minor(i, j) / det
                let mut minor = Vec::with_capacity((n - 1) * (n - 1));
                for r in (0..n).filter(|&r| r != i) {
                    for c in (0..n).filter(|&c| c != j) {
                        minor.push(self.get(r, c) as i128);
                    }
                }
                let m = bareiss_det(n - 1, minor)?;
                let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                let v = i64::try_from(sign * m * det as i128).map_err(|_| Error::Overflow("inverse".into()))?;
                inv.set(j, i, v);
            }
        }
        Ok(inv)
    }

    /// `A v` in floating point.
    pub fn mul_vec_f64(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &x)| a as f64 * x).sum())
            .collect()
    }

    /// `A^T v` in floating point.
    pub fn tmul_vec_f64(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j) as f64 * v[i]).sum())
            .collect()
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j) as f64)
    }
}

impl TryFrom<Vec<Vec<i64>>> for IntMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self> {
        Self::from_rows(&rows)
    }
}

impl From<IntMatrix> for Vec<Vec<i64>> {
    fn from(m: IntMatrix) -> Self {
        m.rows()
    }
}

fn bareiss_det(n: usize, mut a: Vec<i128>) -> Result<i128> {
    if n == 0 {
        return Ok(1);
    }
    let overflow = || Error::Overflow("determinant".into());
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k * n + k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| a[r * n + k] != 0) else {
                return Ok(0);
            };
            for c in 0..n {
                a.swap(k * n + c, p * n + c);
            }
            sign = -sign;
        }
        let pivot = a[k * n + k];
        for i in k + 1..n {
            for j in k + 1..n {
                let t = a[i * n + j]
                    .checked_mul(pivot)
                    .and_then(|x| x.checked_sub(a[i * n + k].checked_mul(a[k * n + j])?))
                    .ok_or_else(overflow)?;
                a[i * n + j] = t / prev;
            }
        }
        prev = pivot;
    }
    Ok(sign * a[n * n - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_and_inverse() {
        let a = IntMatrix::from_rows(&[vec![2, 3, 1], vec![1, 2, 1], vec![1, 1, 1]]).unwrap();
        assert_eq!(a.determinant().unwrap(), 1);
        let inv = a.unimodular_inverse().unwrap();
        assert_eq!(a.checked_mul(&inv).unwrap(), IntMatrix::identity(3));
        let swap = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(swap.determinant().unwrap(), -1);
        assert_eq!(swap.checked_mul(&swap.unimodular_inverse().unwrap()).unwrap(), IntMatrix::identity(2));
    }

    #[test]
    fn singular_has_no_unimodular_inverse() {
        let a = IntMatrix::from_rows(&[vec![2, 4], vec![1, 2]]).unwrap();
        assert_eq!(a.determinant().unwrap(), 0);
        assert!(a.unimodular_inverse().is_err());
    }

    #[test]
    fn float_products() {
        let a = IntMatrix::from_rows(&[vec![2, 3], vec![1, 2]]).unwrap();
        assert_eq!(a.mul_vec_f64(&[1.0, -1.0]), vec![-1.0, -1.0]);
        assert_eq!(a.tmul_vec_f64(&[1.0, -1.0]), vec![1.0, 1.0]);
    }
}
