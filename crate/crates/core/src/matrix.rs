//! Small dense square matrices over a generic [`Scalar`].

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major n×n matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> SquareMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        SquareMatrix { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
            data.extend(row);
        }
        Ok(SquareMatrix { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, c: &T) -> Self {
        SquareMatrix { n: self.n, data: self.data.iter().map(|x| x.clone() * c.clone()).collect() }
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: v.len() });
        }
        Ok((0..self.n)
            .map(|i| {
                (0..self.n).fold(T::zero(), |acc, j| acc + self[(i, j)].clone() * v[j].clone())
            })
            .collect())
    }

    pub fn trace(&self) -> T {
        (0..self.n).fold(T::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    /// max |a_ij|, in f64.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.abs().to_f64_lossy()).fold(0.0, f64::max)
    }

    /// Conjugation A·self·Aᵗ.
    pub fn conjugate_by(&self, a: &Self) -> Self {
        &(a * self) * &a.transpose()
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> T {
        let n = self.n;
        let mut m = self.clone();
        let mut det = T::one();
        for col in 0..n {
            let Some(piv) = pivot_row(&m, col, col) else {
                return T::zero();
            };
            if piv != col {
                m.swap_rows(piv, col);
                det = -det;
            }
            let p = m[(col, col)].clone();
            det = det * p.clone();
            for r in col + 1..n {
                let f = m[(r, col)].clone() / p.clone();
                if f.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = m[(col, c)].clone() * f.clone();
                    m[(r, c)] = m[(r, c)].clone() - v;
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for c in 0..self.n {
            self.data.swap(a * self.n + c, b * self.n + c);
        }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            (0..self.n)
                .map(|i| Value::Array((0..self.n).map(|j| self[(i, j)].to_json()).collect()))
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = || Error::Parse("expected a square array of scalars".into());
        let rows = v.as_array().ok_or_else(bad)?;
        let rows = rows
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(bad)?
                    .iter()
                    .map(|x| T::from_json(x).ok_or_else(bad))
                    .collect::<Result<Vec<T>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(rows)
    }
}

fn pivot_row<T: Scalar>(m: &SquareMatrix<T>, col: usize, from: usize) -> Option<usize> {
    if T::EXACT {
        (from..m.n).find(|&r| !m[(r, col)].is_zero())
    } else {
        let (best, val) = (from..m.n)
            .map(|r| (r, m[(r, col)].abs().to_f64_lossy()))
            .fold((from, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        (val > 0.0).then_some(best)
    }
}

/// Rank of a list of vectors (rows), exact for rationals, `tol`-thresholded for floats.
pub fn rank<T: Scalar>(rows: &[Vec<T>], tol: f64) -> usize {
    let mut m: Vec<Vec<T>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        if rank == m.len() {
            break;
        }
        let piv = if T::EXACT {
            (rank..m.len()).find(|&r| !m[r][col].is_zero())
        } else {
            (rank..m.len())
                .map(|r| (r, m[r][col].abs().to_f64_lossy()))
                .filter(|x| x.1 > tol)
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .map(|x| x.0)
        };
        let Some(piv) = piv else { continue };
        m.swap(piv, rank);
        let p = m[rank][col].clone();
        for r in 0..m.len() {
            if r == rank {
                continue;
            }
            let f = m[r][col].clone() / p.clone();
            for c in col..ncols {
                let v = m[rank][c].clone() * f.clone();
                m[r][c] = m[r][c].clone() - v;
            }
        }
        rank += 1;
    }
    rank
}

impl<T> Index<(usize, usize)> for SquareMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for SquareMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

impl<T: Scalar> Mul for &SquareMatrix<T> {
    type Output = SquareMatrix<T>;
    fn mul(self, rhs: &SquareMatrix<T>) -> SquareMatrix<T> {
        assert_eq!(self.n, rhs.n, "matrix dimensions");
        SquareMatrix::from_fn(self.n, |i, j| {
            (0..self.n).fold(T::zero(), |acc, k| acc + self[(i, k)].clone() * rhs[(k, j)].clone())
        })
    }
}

impl<T: Scalar> Add for &SquareMatrix<T> {
    type Output = SquareMatrix<T>;
    fn add(self, rhs: &SquareMatrix<T>) -> SquareMatrix<T> {
        assert_eq!(self.n, rhs.n, "matrix dimensions");
        SquareMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }
}

impl<T: Scalar> Sub for &SquareMatrix<T> {
    type Output = SquareMatrix<T>;
    fn sub(self, rhs: &SquareMatrix<T>) -> SquareMatrix<T> {
        assert_eq!(self.n, rhs.n, "matrix dimensions");
        SquareMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }
}

impl<T: Scalar> Neg for &SquareMatrix<T> {
    type Output = SquareMatrix<T>;
    fn neg(self) -> SquareMatrix<T> {
        SquareMatrix { n: self.n, data: self.data.iter().map(|a| -a.clone()).collect() }
    }
}
