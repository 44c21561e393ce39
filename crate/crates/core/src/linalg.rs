//! Dense complex matrices and a Hermitian eigensolver.
//!
//! Matrices are row-major. The sizes in this crate are small (tens to a few
//! hundred), so plain loops are used throughout.

use core::ops::{Index, IndexMut};

use alloc::{format, vec, vec::Vec};
use num_complex::Complex64;
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;
use num_traits::Zero;

use crate::error::{shape, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(shape(format!(
                "{} values cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Real diagonal matrix.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self · selfᴴ`.
    pub fn gram(&self) -> Self {
        let n = self.rows;
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v: Complex64 = self
                    .row(i)
                    .iter()
                    .zip(self.row(j))
                    .map(|(a, b)| a * b.conj())
                    .sum();
                out[(i, j)] = v;
                out[(j, i)] = v.conj();
            }
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// Multiplies row `i` by `d[i]` (left multiplication by a diagonal).
    pub fn scale_rows(&self, d: &[f64]) -> Result<Self> {
        if d.len() != self.rows {
            return Err(shape(format!("{} row scales for {} rows", d.len(), self.rows)));
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * d[i]))
    }

    /// Multiplies column `j` by `d[j]` (right multiplication by a diagonal).
    pub fn scale_cols(&self, d: &[f64]) -> Result<Self> {
        if d.len() != self.cols {
            return Err(shape(format!("{} column scales for {} columns", d.len(), self.cols)));
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * d[j]))
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sqr().sqrt()
    }

    /// Rows picked by `indices`, in that order.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Self {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn select_cols(&self, indices: &[usize]) -> Self {
        Self::from_fn(self.rows, indices.len(), |i, j| self[(i, indices[j])])
    }

    /// `[self, rhs]`.
    pub fn hstack(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows {
            return Err(shape(format!("hstack of {} and {} rows", self.rows, rhs.rows)));
        }
        Ok(Self::from_fn(self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols {
                self[(i, j)]
            } else {
                rhs[(i, j - self.cols)]
            }
        }))
    }

    /// `[self; rhs]`.
    pub fn vstack(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.cols {
            return Err(shape(format!("vstack of {} and {} columns", self.cols, rhs.cols)));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&rhs.data);
        Ok(Self {
            rows: self.rows + rhs.rows,
            cols: self.cols,
            data,
        })
    }

    /// Eigenvalues of a Hermitian matrix, descending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.hermitian_eigen()?.0)
    }

    /// Eigen-decomposition `A = V diag(λ) Vᴴ` of a Hermitian matrix by cyclic
    /// Jacobi rotations. Eigenvalues are sorted descending; the columns of the
    /// returned matrix are the matching orthonormal eigenvectors.
    pub fn hermitian_eigen(&self) -> Result<(Vec<f64>, CMatrix)> {
        let n = self.rows;
        if n != self.cols {
            return Err(shape(format!("eigen of non-square {}x{}", self.rows, self.cols)));
        }
        if !self.is_finite() {
            return Err(Error::Numerical("non-finite matrix entries".into()));
        }
        let mut a = self.clone();
        // symmetrize so round-off in the input cannot stall the sweeps
        for i in 0..n {
            a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
            for j in i + 1..n {
                let v = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
                a[(i, j)] = v;
                a[(j, i)] = v.conj();
            }
        }
        let mut v = Self::identity(n);
        let total = a.frobenius_norm_sqr();
        if total == 0.0 {
            return Ok((vec![0.0; n], v));
        }
        let mut converged = n < 2;
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)].norm_sqr())
                .sum();
            if off <= 1e-30 * total {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    let mag = apq.norm();
                    if mag <= 1e-300 {
                        continue;
                    }
                    // phase-align a_pq to the positive real axis via D = diag(.., e^{-iφ} at q, ..)
                    let phase = apq / mag;
                    for k in 0..n {
                        a[(q, k)] *= phase;
                    }
                    for k in 0..n {
                        a[(k, q)] *= phase.conj();
                    }
                    for k in 0..n {
                        v[(k, q)] *= phase.conj();
                    }
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let theta = 0.5 * (2.0 * mag).atan2(aqq - app);
                    let (s, c) = theta.sin_cos();
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = akp * c - akq * s;
                        a[(k, q)] = akp * s + akq * c;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = apk * c - aqk * s;
                        a[(q, k)] = apk * s + aqk * c;
                    }
                    a[(p, q)] = Complex64::zero();
                    a[(q, p)] = Complex64::zero();
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * c - vkq * s;
                        v[(k, q)] = vkp * s + vkq * c;
                    }
                }
            }
        }
        if !converged {
            return Err(Error::Numerical("Jacobi eigensolver did not converge".into()));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
        let values = order.iter().map(|&i| a[(i, i)].re).collect();
        let vectors = v.select_cols(&order);
        Ok((values, vectors))
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// `aᴴ b` for equal-length vectors.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vector_norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
