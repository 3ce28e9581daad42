//! Small dense linear algebra: a column-major matrix, Cholesky factorization
//! with triangular solves, and a cyclic Jacobi eigensolver for symmetric
//! matrices.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Dense matrix stored column-major.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
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

    /// Builds a matrix from column vectors of equal length.
    pub fn from_columns(rows: usize, columns: &[Vec<f64>]) -> Self {
        let mut data = Vec::with_capacity(rows * columns.len());
        for c in columns {
            assert_eq!(c.len(), rows, "column length mismatch");
            data.extend_from_slice(c);
        }
        Self { rows, cols: columns.len(), data }
    }

    /// Builds a matrix from row-major data.
    pub fn from_row_major(rows: usize, cols: usize, values: &[f64]) -> Self {
        assert_eq!(values.len(), rows * cols);
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = values[i * cols + j];
            }
        }
        m
    }

    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.cols).map(|j| self[(i, j)]).collect()
    }

    pub fn as_col_major(&self) -> &[f64] {
        &self.data
    }

    /// Appends the columns of `other` after the existing columns.
    pub fn push_columns(&mut self, other: &Matrix) {
        assert_eq!(self.rows, other.rows);
        self.data.extend_from_slice(&other.data);
        self.cols += other.cols;
    }

    /// Inserts the columns of `block` so that its first column lands at `at`.
    pub fn insert_columns(&mut self, at: usize, block: &Matrix) {
        assert_eq!(self.rows, block.rows);
        assert!(at <= self.cols);
        let offset = at * self.rows;
        self.data.splice(offset..offset, block.data.iter().copied());
        self.cols += block.cols;
    }

    /// Removes `count` columns starting at `at`.
    pub fn remove_columns(&mut self, at: usize, count: usize) {
        assert!(at + count <= self.cols);
        self.data.drain(at * self.rows..(at + count) * self.rows);
        self.cols -= count;
    }

    /// Overwrites `block.cols()` columns starting at `at`.
    pub fn replace_columns(&mut self, at: usize, block: &Matrix) {
        assert_eq!(self.rows, block.rows);
        assert!(at + block.cols <= self.cols);
        let offset = at * self.rows;
        self.data[offset..offset + block.data.len()].copy_from_slice(&block.data);
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            for i in 0..self.rows {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        let mut out = vec![0.0; self.rows];
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            for (o, v) in out.iter_mut().zip(self.col(j)) {
                *o += v * xj;
            }
        }
        out
    }

    /// `self' * x`.
    pub fn tr_matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows);
        (0..self.cols).map(|j| dot(self.col(j), x)).collect()
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            let col = self.matvec(other.col(j));
            out.col_mut(j).copy_from_slice(&col);
        }
        out
    }

    /// Gram matrix `self' * self`.
    pub fn gram(&self) -> Matrix {
        let w = self.cols;
        let mut g = Matrix::zeros(w, w);
        for i in 0..w {
            for j in 0..=i {
                let v = dot(self.col(i), self.col(j));
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        g
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| math::abs(a - b))
            .fold(0.0, f64::max)
    }
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[j * self.rows + i]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    lower: Matrix,
}

impl Cholesky {
    /// Factors `a`. Fails with `SingularDesign` when a pivot is not
    /// positive or when the diagonally rescaled factor implies a condition
    /// number above `max_condition`.
    pub fn new(a: &Matrix, max_condition: f64) -> Result<Self> {
        let n = a.rows();
        assert_eq!(n, a.cols());
        let mut l = Matrix::zeros(n, n);
        let mut min_scaled_pivot_sq = f64::INFINITY;
        for j in 0..n {
            let mut d = a[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            let ajj = a[(j, j)];
            if !(d > 0.0) || !(ajj > 0.0) || !d.is_finite() {
                return Err(Error::SingularDesign);
            }
            min_scaled_pivot_sq = min_scaled_pivot_sq.min(d / ajj);
            let ljj = math::sqrt(d);
            l[(j, j)] = ljj;
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / ljj;
            }
        }
        if n > 0 && 1.0 / min_scaled_pivot_sq > max_condition {
            return Err(Error::SingularDesign);
        }
        Ok(Self { lower: l })
    }

    /// Wraps an existing lower-triangular factor `l` of `a = L L'`, applying
    /// the same pivot and condition checks as [`Cholesky::new`]; `diag`
    /// holds the diagonal of `a`.
    pub fn from_lower(l: Matrix, diag: &[f64], max_condition: f64) -> Result<Self> {
        let n = l.rows();
        let mut min_scaled_pivot_sq = f64::INFINITY;
        for j in 0..n {
            let d = l[(j, j)] * l[(j, j)];
            if !(l[(j, j)] > 0.0) || !(diag[j] > 0.0) || !d.is_finite() {
                return Err(Error::SingularDesign);
            }
            min_scaled_pivot_sq = min_scaled_pivot_sq.min(d / diag[j]);
        }
        if n > 0 && 1.0 / min_scaled_pivot_sq > max_condition {
            return Err(Error::SingularDesign);
        }
        Ok(Self { lower: l })
    }

    pub fn lower(&self) -> &Matrix {
        &self.lower
    }

    pub fn dim(&self) -> usize {
        self.lower.rows()
    }

    /// Solves `L x = b`.
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        let l = &self.lower;
        let n = l.rows();
        let mut x = b.to_vec();
        for i in 0..n {
            let mut s = x[i];
            for k in 0..i {
                s -= l[(i, k)] * x[k];
            }
            x[i] = s / l[(i, i)];
        }
        x
    }

    /// Solves `L' x = b`.
    pub fn solve_upper(&self, b: &[f64]) -> Vec<f64> {
        let l = &self.lower;
        let n = l.rows();
        let mut x = b.to_vec();
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in (i + 1)..n {
                s -= l[(k, i)] * x[k];
            }
            x[i] = s / l[(i, i)];
        }
        x
    }

    /// Solves `A x = b` with `A = L L'`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        self.solve_upper(&self.solve_lower(b))
    }
}

/// Householder QR of `a` (n x w, n >= w) applied alongside `y`.
///
/// Returns `R'` (lower triangular, with a nonnegative diagonal) and `Q'y`
/// (length n): its first `w` entries are the coordinates of `y` in the
/// column space and the remaining entries carry the residual.
pub fn householder_qr(a: &Matrix, y: &[f64]) -> (Matrix, Vec<f64>) {
    let (n, w) = (a.rows(), a.cols());
    assert!(n >= w && y.len() == n);
    let mut m = a.clone();
    let mut qty = y.to_vec();
    let mut v = vec![0.0; n];
    for k in 0..w {
        let col = &m.col(k)[k..];
        let norm = math::sqrt(norm_sq(col));
        if norm == 0.0 {
            continue;
        }
        let alpha = if col[0] > 0.0 { -norm } else { norm };
        let tail = &mut v[k..];
        tail.copy_from_slice(col);
        tail[0] -= alpha;
        let vv = norm_sq(tail);
        if vv > 0.0 {
            for j in (k + 1)..w {
                let c = &mut m.col_mut(j)[k..];
                let f = 2.0 * dot(tail, c) / vv;
                c.iter_mut().zip(tail.iter()).for_each(|(x, t)| *x -= f * t);
            }
            let c = &mut qty[k..];
            let f = 2.0 * dot(tail, c) / vv;
            c.iter_mut().zip(tail.iter()).for_each(|(x, t)| *x -= f * t);
        }
        let c = m.col_mut(k);
        c[k] = alpha;
        c[k + 1..].iter_mut().for_each(|x| *x = 0.0);
    }
    let mut lower = Matrix::zeros(w, w);
    for i in 0..w {
        let sign = if m[(i, i)] < 0.0 { -1.0 } else { 1.0 };
        for j in i..w {
            lower[(j, i)] = sign * m[(i, j)];
        }
        qty[i] *= sign;
    }
    (lower, qty)
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues in nonincreasing order and the matching
/// orthonormal eigenvectors as columns.
pub fn symmetric_eigen(a: &Matrix) -> (Vec<f64>, Matrix) {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    let scale: f64 = m.as_col_major().iter().map(|x| x * x).sum::<f64>();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[(p, q)] * m[(p, q)];
            }
        }
        if off <= 1e-30 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + math::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + math::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / math::sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        // Sign convention: largest-magnitude entry positive.
        let col = v.col(src);
        let pivot = col
            .iter()
            .copied()
            .fold(0.0_f64, |acc, x| if math::abs(x) > math::abs(acc) { x } else { acc });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        for (o, x) in vectors.col_mut(dst).iter_mut().zip(col) {
            *o = sign * x;
        }
    }
    (values, vectors)
}
