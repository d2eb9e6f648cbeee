// SPDX-License-Identifier: Apache-2.0

//! Small dense column-major matrices and the solvers used on them.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Column-major dense matrix. Entry `(i, j)` is the transition `j -> i`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds from column vectors of equal length.
    pub fn from_columns(rows: usize, columns: &[Vec<f64>]) -> Self {
        let mut data = Vec::with_capacity(rows * columns.len());
        for c in columns {
            assert_eq!(c.len(), rows, "column length");
            data.extend_from_slice(c);
        }
        Self { rows, cols: columns.len(), data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.cols).map(|j| self.col(j).iter().sum()).collect()
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Diagonal entries kept, everything else zero.
    pub fn diagonal_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| if i == j { self[(i, j)] } else { 0.0 })
    }

    /// Diagonal zeroed, everything else kept.
    pub fn off_diagonal_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| if i == j { 0.0 } else { self[(i, j)] })
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    /// Largest absolute elementwise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// `self * v`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols, "vector length");
        let mut out = vec![0.0; self.rows];
        self.mul_vec_into(v, &mut out);
        out
    }

    pub fn mul_vec_into(&self, v: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (j, &vj) in v.iter().enumerate() {
            if vj != 0.0 {
                for (o, &a) in out.iter_mut().zip(self.col(j)) {
                    *o += a * vj;
                }
            }
        }
    }

    /// `self * other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimension");
        let mut out = Self::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            let (lo, hi) = (j * self.rows, (j + 1) * self.rows);
            self.mul_vec_into(other.col(j), &mut out.data[lo..hi]);
        }
        out
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[j * self.rows + i]
    }
}

/// LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    swaps: Vec<usize>,
}

impl Lu {
    pub fn factor(m: &DenseMatrix) -> Result<Self> {
        assert_eq!(m.rows, m.cols, "LU of a non-square matrix");
        let n = m.rows;
        let mut a = m.data.clone();
        let mut swaps = Vec::with_capacity(n);
        for k in 0..n {
            let col = &a[k * n..(k + 1) * n];
            let (p, pivot) = (k..n).map(|i| (i, col[i].abs())).fold((k, -1.0), |b, c| if c.1 > b.1 { c } else { b });
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::Singular);
            }
            swaps.push(p);
            if p != k {
                for j in 0..n {
                    a.swap(j * n + k, j * n + p);
                }
            }
            let d = a[k * n + k];
            for i in k + 1..n {
                a[k * n + i] /= d;
            }
            let (left, right) = a.split_at_mut((k + 1) * n);
            let lcol = &left[k * n..];
            for rcol in right.chunks_mut(n) {
                let ukj = rcol[k];
                if ukj != 0.0 {
                    for i in k + 1..n {
                        rcol[i] -= lcol[i] * ukj;
                    }
                }
            }
        }
        Ok(Self { n, lu: a, swaps })
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        assert_eq!(b.len(), n, "rhs length");
        for (k, &p) in self.swaps.iter().enumerate() {
            b.swap(k, p);
        }
        for k in 0..n {
            let bk = b[k];
            if bk != 0.0 {
                let col = &self.lu[k * n..(k + 1) * n];
                for i in k + 1..n {
                    b[i] -= col[i] * bk;
                }
            }
        }
        for k in (0..n).rev() {
            let col = &self.lu[k * n..(k + 1) * n];
            b[k] /= col[k];
            let bk = b[k];
            for i in 0..k {
                b[i] -= col[i] * bk;
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Stationary distribution of a column-stochastic matrix by direct solve of
/// `(M - 1) p = 0` with the last equation replaced by `sum(p) = 1`.
pub fn stationary_direct(m: &DenseMatrix) -> Result<Vec<f64>> {
    let n = m.rows;
    let mut a = DenseMatrix::from_fn(n, n, |i, j| m[(i, j)] - if i == j { 1.0 } else { 0.0 });
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = vec![0.0; n];
    b[n - 1] = 1.0;
    Lu::factor(&a)?.solve_in_place(&mut b);
    Ok(b)
}

/// Outcome of a dense power iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct Stationary {
    pub p: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Power iteration `p <- M p` from `start` (uniform when `None`) until the
/// L1 change drops below `tol`. The iterate is renormalized to unit sum.
pub fn stationary_power(m: &DenseMatrix, start: Option<&[f64]>, tol: f64, max_iters: usize) -> Result<Stationary> {
    let n = m.rows;
    let mut p = match start {
        Some(s) => s.to_vec(),
        None => vec![1.0 / n as f64; n],
    };
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for it in 1..=max_iters {
        m.mul_vec_into(&p, &mut next);
        let s: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= s);
        residual = p.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        core::mem::swap(&mut p, &mut next);
        if residual < tol {
            return Ok(Stationary { p, iterations: it, residual });
        }
    }
    Err(Error::NotConverged { what: "dense power iteration", iterations: max_iters, residual })
}
