//! Dense column-major linear algebra sized for tall-skinny systems:
//! Householder QR, one-sided Jacobi SVD, exact least squares and
//! Kronecker utilities.

use crate::error::{Error, Result};

/// Ratio below which sigma_min/sigma_max is treated as rank deficiency.
pub const RANK_TOL: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 60;
const KRON_ENTRY_GUARD: usize = 1 << 26;
const TENSOR_ENTRY_GUARD: usize = 1 << 24;

/// Column-major real matrix. Constructors reject non-finite entries.
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
            m.set(i, i, 1.0);
        }
        m
    }

    /// Build from column-major data.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, got: data.len() });
        }
        if let Some(i) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { rows, cols, data })
    }

    /// Build from row-major data (the order matrices appear in CSV files).
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, got: data.len() });
        }
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let v = data[i * cols + j];
                if !v.is_finite() {
                    return Err(Error::NonFinite(i * cols + j));
                }
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[j * self.rows + i] = v;
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn column_vec(&self, j: usize) -> DenseVector {
        DenseVector::from_slice(self.col(j))
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            for k in 0..self.cols {
                let b = other.get(k, j);
                if b == 0.0 {
                    continue;
                }
                let a_col = self.col(k);
                let o_col = out.col_mut(j);
                for i in 0..self.rows {
                    o_col[i] += a_col[i] * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &DenseVector) -> Result<DenseVector> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        let mut out = vec![0.0; self.rows];
        for j in 0..self.cols {
            let x = v[j];
            if x == 0.0 {
                continue;
            }
            let col = self.col(j);
            for i in 0..self.rows {
                out[i] += col[i] * x;
            }
        }
        Ok(DenseVector::new(out))
    }

    /// A^T v without forming the transpose.
    pub fn matvec_t(&self, v: &DenseVector) -> Result<DenseVector> {
        if self.rows != v.len() {
            return Err(Error::DimensionMismatch { expected: self.rows, got: v.len() });
        }
        let out = (0..self.cols).map(|j| dot(self.col(j), v.as_slice())).collect();
        Ok(DenseVector::new(out))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Zero-pad rows up to `new_rows` (no-op when already that tall).
    pub fn pad_rows(&self, new_rows: usize) -> Result<DenseMatrix> {
        if new_rows < self.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, got: new_rows });
        }
        let mut out = DenseMatrix::zeros(new_rows, self.cols);
        for j in 0..self.cols {
            out.col_mut(j)[..self.rows].copy_from_slice(self.col(j));
        }
        Ok(out)
    }
}

/// Real vector with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector {
    data: Vec<f64>,
}

impl DenseVector {
    pub fn new(data: Vec<f64>) -> Self {
        Self { data }
    }

    pub fn checked(data: Vec<f64>) -> Result<Self> {
        if let Some(i) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { data })
    }

    pub fn zeros(len: usize) -> Self {
        Self { data: vec![0.0; len] }
    }

    pub fn from_slice(s: &[f64]) -> Self {
        Self { data: s.to_vec() }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn dot(&self, other: &DenseVector) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), got: other.len() });
        }
        Ok(dot(&self.data, &other.data))
    }

    pub fn scale(&self, c: f64) -> DenseVector {
        DenseVector::new(self.data.iter().map(|x| c * x).collect())
    }

    pub fn sub(&self, other: &DenseVector) -> Result<DenseVector> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), got: other.len() });
        }
        Ok(DenseVector::new(self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect()))
    }

    pub fn pad(&self, new_len: usize) -> Result<DenseVector> {
        if new_len < self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), got: new_len });
        }
        let mut data = self.data.clone();
        data.resize(new_len, 0.0);
        Ok(DenseVector::new(data))
    }
}

impl std::ops::Index<usize> for DenseVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

impl std::ops::IndexMut<usize> for DenseVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.data[i]
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Thin SVD A = U diag(sigma) V^T with sigma nonincreasing.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: DenseMatrix,
    pub sigma: DenseVector,
    pub v: DenseMatrix,
}

/// Thin Householder QR of a tall matrix: A = QR with Q n-by-d orthonormal
/// and R d-by-d upper triangular.
pub fn householder_qr(a: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let (n, d) = (a.rows(), a.cols());
    if n < d {
        return Err(Error::DimensionMismatch { expected: d, got: n });
    }
    let mut work = a.clone();
    // Reflectors stored as (start column, vector); applied to b later via q.
    let mut vs: Vec<Vec<f64>> = Vec::with_capacity(d);
    for k in 0..d {
        let col = work.col(k);
        let norm = col[k..].iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::ZeroColumn(k));
        }
        let alpha = if col[k] >= 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = col[k..].to_vec();
        v[0] -= alpha;
        let vnorm2 = v.iter().map(|x| x * x).sum::<f64>();
        if vnorm2 > 0.0 {
            // Apply I - 2vv^T/(v^Tv) to the trailing columns.
            for j in k..d {
                let cj = work.col_mut(j);
                let s = 2.0 * dot(&v, &cj[k..]) / vnorm2;
                for (vi, c) in v.iter().zip(cj[k..].iter_mut()) {
                    *c -= s * vi;
                }
            }
        }
        work.set(k, k, alpha);
        vs.push(v);
    }
    let mut r = DenseMatrix::zeros(d, d);
    for j in 0..d {
        for i in 0..=j {
            r.set(i, j, work.get(i, j));
        }
    }
    // Accumulate thin Q by applying the reflectors to the first d columns of I.
    let mut q = DenseMatrix::zeros(n, d);
    for j in 0..d {
        q.set(j, j, 1.0);
    }
    for j in 0..d {
        let cj = q.col_mut(j);
        for k in (0..d).rev() {
            let v = &vs[k];
            let vnorm2 = v.iter().map(|x| x * x).sum::<f64>();
            if vnorm2 == 0.0 {
                continue;
            }
            let s = 2.0 * dot(v, &cj[k..]) / vnorm2;
            for (vi, c) in v.iter().zip(cj[k..].iter_mut()) {
                *c -= s * vi;
            }
        }
    }
    Ok((q, r))
}

/// Thin SVD for small column counts (d <= 64): Householder QR first, then
/// one-sided Jacobi on the d-by-d triangular factor.
pub fn svd_small(a: &DenseMatrix) -> Result<SvdResult> {
    let (n, d) = (a.rows(), a.cols());
    if d > 64 {
        return Err(Error::BadParameters(format!("svd_small requires cols <= 64, got {d}")));
    }
    if n < d {
        return Err(Error::DimensionMismatch { expected: d, got: n });
    }
    // QR can fail on an exactly zero column; fall back to Jacobi on the
    // full matrix in that case (still small since d <= 64).
    let (q, r) = match householder_qr(a) {
        Ok(qr) => qr,
        Err(Error::ZeroColumn(_)) => (DenseMatrix::identity(n), a.clone()),
        Err(e) => return Err(e),
    };
    let (ur, sigma, v) = one_sided_jacobi(&r)?;
    let u = q.matmul(&ur)?;
    Ok(SvdResult { u, sigma, v })
}

/// One-sided Jacobi SVD of B (rows >= cols): returns (U, sigma, V) with
/// B = U diag(sigma) V^T, sigma sorted nonincreasing.
fn one_sided_jacobi(b: &DenseMatrix) -> Result<(DenseMatrix, DenseVector, DenseMatrix)> {
    let (n, d) = (b.rows(), b.cols());
    let mut w = b.clone();
    let mut v = DenseMatrix::identity(d);
    let tol = 1e-14;
    let mut converged = false;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut max_off = 0.0_f64;
        for p in 0..d {
            for q in (p + 1)..d {
                let (wp_ptr, wq_ptr) = (p, q);
                let app = dot(w.col(wp_ptr), w.col(wp_ptr));
                let aqq = dot(w.col(wq_ptr), w.col(wq_ptr));
                let apq = dot(w.col(wp_ptr), w.col(wq_ptr));
                let denom = (app * aqq).sqrt();
                let off = if denom > 0.0 { apq.abs() / denom } else { 0.0 };
                max_off = max_off.max(off);
                if off <= tol {
                    continue;
                }
                // Jacobi rotation zeroing the (p,q) entry of W^T W.
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_cols(&mut w, p, q, c, s, n);
                rotate_cols(&mut v, p, q, c, s, d);
            }
        }
        if max_off <= tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence(JACOBI_MAX_SWEEPS));
    }
    let mut sigma: Vec<f64> = (0..d).map(|j| dot(w.col(j), w.col(j)).sqrt()).collect();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).unwrap());
    let mut u = DenseMatrix::zeros(n, d);
    let mut vs = DenseMatrix::zeros(d, d);
    let mut sorted_sigma = vec![0.0; d];
    for (out_j, &in_j) in order.iter().enumerate() {
        sorted_sigma[out_j] = sigma[in_j];
        vs.col_mut(out_j).copy_from_slice(v.col(in_j));
        let s = sigma[in_j];
        if s > 0.0 {
            let src = w.col(in_j);
            let dst = u.col_mut(out_j);
            for i in 0..n {
                dst[i] = src[i] / s;
            }
        }
    }
    // Columns with exactly zero singular value get replaced by unit vectors
    // orthogonal to the rest so U keeps orthonormal columns.
    for j in 0..d {
        if sorted_sigma[j] == 0.0 {
            orthonormal_fill(&mut u, j);
        }
    }
    sigma = sorted_sigma;
    Ok((u, DenseVector::new(sigma), vs))
}

fn rotate_cols(m: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64, n: usize) {
    for i in 0..n {
        let a = m.get(i, p);
        let b = m.get(i, q);
        m.set(i, p, c * a - s * b);
        m.set(i, q, s * a + c * b);
    }
}

/// Replace column j of u with a unit vector orthogonal to all other columns.
fn orthonormal_fill(u: &mut DenseMatrix, j: usize) {
    let n = u.rows();
    let d = u.cols();
    for cand in 0..n {
        let mut v = vec![0.0; n];
        v[cand] = 1.0;
        for k in 0..d {
            if k == j {
                continue;
            }
            let proj = dot(&v, u.col(k));
            for (vi, uk) in v.iter_mut().zip(u.col(k)) {
                *vi -= proj * uk;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            for (i, vi) in v.iter().enumerate() {
                u.set(i, j, vi / norm);
            }
            return;
        }
    }
}

/// Exact least squares min ||Ax - b||_2 via thin Householder QR.
/// Errors with RankDeficient when sigma_min/sigma_max <= 1e-10.
pub fn solve_ls_exact(a: &DenseMatrix, b: &DenseVector) -> Result<DenseVector> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), got: b.len() });
    }
    let svd = svd_small(a)?;
    let smax = svd.sigma[0];
    let smin = svd.sigma[a.cols() - 1];
    if smax == 0.0 || smin / smax <= RANK_TOL {
        return Err(Error::RankDeficient(if smax == 0.0 { 0.0 } else { smin / smax }));
    }
    let (q, r) = householder_qr(a)?;
    let qtb = q.matvec_t(b)?;
    back_substitute(&r, &qtb)
}

/// Solve Rx = y for upper triangular R.
pub fn back_substitute(r: &DenseMatrix, y: &DenseVector) -> Result<DenseVector> {
    let d = r.cols();
    if y.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: y.len() });
    }
    let mut x = vec![0.0; d];
    for i in (0..d).rev() {
        let mut s = y[i];
        for j in (i + 1)..d {
            s -= r.get(i, j) * x[j];
        }
        let rii = r.get(i, i);
        if rii == 0.0 {
            return Err(Error::RankDeficient(0.0));
        }
        x[i] = s / rii;
    }
    Ok(DenseVector::new(x))
}

/// Spectral norm of the pseudoinverse, 1/sigma_min(A).
pub fn pinv_spectral_norm(a: &DenseMatrix) -> Result<f64> {
    let svd = svd_small(a)?;
    let smax = svd.sigma[0];
    let smin = svd.sigma[a.cols() - 1];
    if smax == 0.0 || smin / smax <= RANK_TOL {
        return Err(Error::RankDeficient(if smax == 0.0 { 0.0 } else { smin / smax }));
    }
    Ok(1.0 / smin)
}

/// Explicit Kronecker product A1 (x) A2.
pub fn kronecker_materialize(a1: &DenseMatrix, a2: &DenseMatrix) -> Result<DenseMatrix> {
    let rows = a1.rows() * a2.rows();
    let cols = a1.cols() * a2.cols();
    if rows.saturating_mul(cols) > KRON_ENTRY_GUARD {
        return Err(Error::TooLarge(rows * cols, KRON_ENTRY_GUARD));
    }
    let mut out = DenseMatrix::zeros(rows, cols);
    for j1 in 0..a1.cols() {
        for j2 in 0..a2.cols() {
            let j = j1 * a2.cols() + j2;
            for i1 in 0..a1.rows() {
                let x = a1.get(i1, j1);
                for i2 in 0..a2.rows() {
                    out.set(i1 * a2.rows() + i2, j, x * a2.get(i2, j2));
                }
            }
        }
    }
    Ok(out)
}

/// Tensor product of vectors, x (x) y = vec(x y^T) in row-block order.
pub fn tensor_vec(x: &DenseVector, y: &DenseVector) -> Result<DenseVector> {
    let len = x.len().saturating_mul(y.len());
    if len > TENSOR_ENTRY_GUARD {
        return Err(Error::TooLarge(len, TENSOR_ENTRY_GUARD));
    }
    let mut out = Vec::with_capacity(len);
    for i in 0..x.len() {
        let xi = x[i];
        for j in 0..y.len() {
            out.push(xi * y[j]);
        }
    }
    Ok(DenseVector::new(out))
}
