//! Dense complex linear algebra: the matrix carrier used for site tensors and
//! reduced density matrices, plus SVD, Hermitian eigendecomposition and thin
//! QR.
//!
//! Decompositions are delegated to `faer`. When every entry of the input has
//! a zero imaginary part the real routines are used instead, which is about
//! four times cheaper and covers most of the example states.

use std::ops::{Index, IndexMut};

use faer::{Mat, MatRef, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Absolute tolerance for structural checks (Hermiticity, isometry).
pub const TOL: f64 = 1e-10;

/// Eigenvalues of a density matrix in `[-CLAMP_TOL, 0)` are set to zero;
/// anything below is a numerical failure.
pub const CLAMP_TOL: f64 = 1e-12;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Dense complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("matrix has non-finite entries"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    /// Reinterprets the row-major buffer with a new shape of equal size.
    pub fn reshape(self, rows: usize, cols: usize) -> Result<Self> {
        if rows * cols != self.data.len() {
            return Err(Error::ShapeMismatch(format!(
                "cannot reshape {}x{} into {rows}x{cols}",
                self.rows, self.cols
            )));
        }
        Ok(Self {
            rows,
            cols,
            data: self.data,
        })
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch(format!(
                "matmul {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        if self.rows == 0 || rhs.cols == 0 || self.cols == 0 {
            return Ok(Self::zeros(self.rows, rhs.cols));
        }
        let prod = self.view() * rhs.view();
        Ok(Self::from_faer(prod.as_ref()))
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::ShapeMismatch(format!(
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

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (r2, c2) = (rhs.rows, rhs.cols);
        Self::from_fn(self.rows * r2, self.cols * c2, |i, j| {
            self[(i / r2, j / c2)] * rhs[(i % r2, j % c2)]
        })
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Largest entry of `|m - m†|`, or infinity for non-square input.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    pub(crate) fn view(&self) -> MatRef<'_, C64> {
        MatRef::from_row_major_slice(&self.data, self.rows, self.cols)
    }

    pub(crate) fn from_faer(m: MatRef<'_, C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    fn real_part(&self) -> Mat<f64> {
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)].re)
    }

    fn from_real(m: MatRef<'_, f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| C64::new(m[(i, j)], 0.0))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Thin singular value decomposition `m = u · diag(s) · vh`.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: ComplexMatrix,
    /// Nonnegative, nonincreasing.
    pub s: Vec<f64>,
    pub vh: ComplexMatrix,
}

impl Svd {
    /// Keeps the leading `k` singular triplets.
    pub fn truncate(mut self, k: usize) -> Self {
        let k = k.min(self.s.len());
        if k == self.s.len() {
            return self;
        }
        let u = ComplexMatrix::from_fn(self.u.rows(), k, |i, j| self.u[(i, j)]);
        let vh_cols = self.vh.cols();
        let mut vh_data = self.vh.into_vec();
        vh_data.truncate(k * vh_cols);
        self.s.truncate(k);
        Self {
            u,
            s: self.s,
            vh: ComplexMatrix {
                rows: k,
                cols: vh_cols,
                data: vh_data,
            },
        }
    }

    /// `diag(s) · vh`
    pub fn s_vh(&self) -> ComplexMatrix {
        let mut out = self.vh.clone();
        for (i, &s) in self.s.iter().enumerate() {
            for z in &mut out.data[i * out.cols..(i + 1) * out.cols] {
                *z *= s;
            }
        }
        out
    }

    /// `u · diag(s)`
    pub fn u_s(&self) -> ComplexMatrix {
        let mut out = self.u.clone();
        let k = self.s.len();
        for row in out.data.chunks_mut(k.max(1)) {
            for (z, &s) in row.iter_mut().zip(&self.s) {
                *z *= s;
            }
        }
        out
    }
}

pub fn svd(m: &ComplexMatrix) -> Result<Svd> {
    if m.rows == 0 || m.cols == 0 {
        return Ok(Svd {
            u: ComplexMatrix::zeros(m.rows, 0),
            s: Vec::new(),
            vh: ComplexMatrix::zeros(0, m.cols),
        });
    }
    let fail = |e: faer::linalg::svd::SvdError| {
        Error::numerical(format!("SVD of {}x{} matrix did not converge: {e:?}", m.rows, m.cols))
    };
    let (u, s, vh) = if m.is_real() {
        let re = m.real_part();
        let d = re.thin_svd().map_err(fail)?;
        let s: Vec<f64> = d.S().column_vector().iter().copied().collect();
        (
            ComplexMatrix::from_real(d.U()),
            s,
            ComplexMatrix::from_real(d.V().transpose()),
        )
    } else {
        let d = m.view().thin_svd().map_err(fail)?;
        let s: Vec<f64> = d.S().column_vector().iter().map(|z| z.re).collect();
        (
            ComplexMatrix::from_faer(d.U()),
            s,
            ComplexMatrix::from_faer(d.V()).adjoint(),
        )
    };
    if s.iter().any(|x| !x.is_finite()) {
        return Err(Error::numerical(format!(
            "SVD of {}x{} matrix produced non-finite singular values",
            m.rows, m.cols
        )));
    }
    Ok(Svd { u, s: s.into_iter().map(|x| x.max(0.0)).collect(), vh })
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    /// Nonincreasing.
    pub values: Vec<f64>,
    /// Eigenvectors as columns, ordered like `values`.
    pub vectors: ComplexMatrix,
}

pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEig> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "eigendecomposition of non-square {}x{} matrix",
            m.rows, m.cols
        )));
    }
    let defect = m.hermiticity_defect();
    if defect > TOL {
        return Err(Error::invalid(format!(
            "matrix is not Hermitian (defect {defect:.3e})"
        )));
    }
    let n = m.rows;
    if n == 0 {
        return Ok(HermitianEig {
            values: Vec::new(),
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let fail = |e: faer::linalg::evd::EvdError| {
        Error::numerical(format!("eigendecomposition of {n}x{n} matrix failed: {e:?}"))
    };
    // faer returns ascending order; flip to nonincreasing.
    let (values, vectors) = if m.is_real() {
        let d = m.real_part().self_adjoint_eigen(Side::Lower).map_err(fail)?;
        let vals: Vec<f64> = d.S().column_vector().iter().copied().collect();
        let u = d.U();
        (
            vals.into_iter().rev().collect::<Vec<_>>(),
            ComplexMatrix::from_fn(n, n, |i, j| C64::new(u[(i, n - 1 - j)], 0.0)),
        )
    } else {
        let d = m.view().self_adjoint_eigen(Side::Lower).map_err(fail)?;
        let vals: Vec<f64> = d.S().column_vector().iter().map(|z| z.re).collect();
        let u = d.U();
        (
            vals.into_iter().rev().collect::<Vec<_>>(),
            ComplexMatrix::from_fn(n, n, |i, j| u[(i, n - 1 - j)]),
        )
    };
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::numerical(format!(
            "eigendecomposition of {n}x{n} matrix produced non-finite values"
        )));
    }
    Ok(HermitianEig { values, vectors })
}

/// Eigenvalues only, nonincreasing.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "eigenvalues of non-square {}x{} matrix",
            m.rows, m.cols
        )));
    }
    let defect = m.hermiticity_defect();
    if defect > TOL {
        return Err(Error::invalid(format!(
            "matrix is not Hermitian (defect {defect:.3e})"
        )));
    }
    if m.rows == 0 {
        return Ok(Vec::new());
    }
    let fail = |e: faer::linalg::evd::EvdError| {
        Error::numerical(format!("eigenvalues of {0}x{0} matrix failed: {e:?}", m.rows))
    };
    let mut vals = if m.is_real() {
        m.real_part().self_adjoint_eigenvalues(Side::Lower).map_err(fail)?
    } else {
        m.view()
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(fail)?
    };
    vals.reverse();
    Ok(vals)
}

/// Thin QR: `m = q · r` with `q` having orthonormal columns.
pub(crate) fn qr(m: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    if m.rows == 0 || m.cols == 0 {
        let k = m.rows.min(m.cols);
        return (ComplexMatrix::zeros(m.rows, k), ComplexMatrix::zeros(k, m.cols));
    }
    if m.is_real() {
        let d = m.real_part().qr();
        (
            ComplexMatrix::from_real(d.compute_thin_Q().as_ref()),
            ComplexMatrix::from_real(d.thin_R()),
        )
    } else {
        let d = m.view().qr();
        (
            ComplexMatrix::from_faer(d.compute_thin_Q().as_ref()),
            ComplexMatrix::from_faer(d.thin_R()),
        )
    }
}

/// Thin LQ: `m = l · q` with `q` having orthonormal rows.
pub(crate) fn lq(m: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let (q, r) = qr(&m.adjoint());
    (r.adjoint(), q.adjoint())
}

/// Real symmetric eigendecomposition used by the exact propagator; values
/// ascending, vectors column-major as returned by faer.
pub(crate) fn real_symmetric_eig(m: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let n = m.nrows();
    let d = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::numerical(format!("eigendecomposition of {n}x{n} matrix failed: {e:?}")))?;
    let vals: Vec<f64> = d.S().column_vector().iter().copied().collect();
    Ok((vals, d.U().to_owned()))
}
