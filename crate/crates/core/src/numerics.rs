//! Dense complex linear algebra.
//!
//! Every operator in the crate (analysis, synthesis, frame and resolution
//! operators, kernels) is materialized as a [`ComplexMatrix`]. Eigenvalues of
//! Hermitian matrices come from cyclic complex Jacobi rotations, singular
//! values from one-sided (Hestenes) Jacobi. Both are accurate to a few ulps
//! relative to the largest entry, which is what the frame-bound and rank
//! decisions downstream rely on.
//!
//! All numerical-rank decisions go through [`RankPolicy`].

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const MAX_SWEEPS: usize = 80;

/// `Σ a_i · conj(b_i)`: linear in the first slot, conjugate-linear in the second.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

pub fn norm_sq(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    norm_sq(a).sqrt()
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        if !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        Self::from_row_major(rows.len(), cols, data)
    }

    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        Self::from_row_major(rows, cols, values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        for c in columns {
            if c.len() != rows {
                return Err(Error::DimensionMismatch { expected: rows, found: c.len() });
            }
        }
        let m = Self::from_fn(rows, columns.len(), |i, j| columns[j][i]);
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(m)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn into_entries(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [C64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    /// Matrix product. Panics on incompatible shapes; public operations check
    /// shapes before reaching this point.
    pub fn mul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn add(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: C64) -> ComplexMatrix {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> ComplexMatrix {
        self.scale(C64::new(s, 0.0))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |A − Aᴴ|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// `(A + Aᴴ)/2`.
    pub fn symmetrized(&self) -> ComplexMatrix {
        let mut out = self.clone();
        for i in 0..self.rows {
            out[(i, i)] = C64::new(self[(i, i)].re, 0.0);
            for j in i + 1..self.cols {
                let v = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                out[(i, j)] = v;
                out[(j, i)] = v.conj();
            }
        }
        out
    }

    /// Applies the 2×2 unitary `g` (as `[g_pp, g_pq, g_qp, g_qq]`) to columns
    /// `p`, `q` from the right.
    fn rotate_columns(&mut self, p: usize, q: usize, g: &[C64; 4]) {
        for i in 0..self.rows {
            let a = self.data[i * self.cols + p];
            let b = self.data[i * self.cols + q];
            self.data[i * self.cols + p] = a * g[0] + b * g[2];
            self.data[i * self.cols + q] = a * g[1] + b * g[3];
        }
    }

    /// Applies `gᴴ` to rows `p`, `q` from the left.
    fn rotate_rows_adjoint(&mut self, p: usize, q: usize, g: &[C64; 4]) {
        for j in 0..self.cols {
            let a = self.data[p * self.cols + j];
            let b = self.data[q * self.cols + j];
            self.data[p * self.cols + j] = g[0].conj() * a + g[2].conj() * b;
            self.data[q * self.cols + j] = g[1].conj() * a + g[3].conj() * b;
        }
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

/// Relative numerical-rank threshold: a singular value counts when it exceeds
/// `relative_threshold · σ_max · max(rows, cols)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankPolicy {
    relative_threshold: f64,
}

impl Default for RankPolicy {
    fn default() -> Self {
        RankPolicy { relative_threshold: 1e-10 }
    }
}

impl RankPolicy {
    pub fn new(relative_threshold: f64) -> Result<Self> {
        if !(relative_threshold > 0.0 && relative_threshold.is_finite()) {
            return Err(Error::InvalidPolicy);
        }
        Ok(RankPolicy { relative_threshold })
    }

    pub fn relative_threshold(&self) -> f64 {
        self.relative_threshold
    }

    /// Absolute cutoff for a matrix of the given shape and largest singular value.
    pub fn cutoff(&self, sigma_max: f64, rows: usize, cols: usize) -> f64 {
        self.relative_threshold * sigma_max * rows.max(cols) as f64
    }

    /// Number of singular values above the cutoff (`singular_values` descending).
    pub fn count(&self, singular_values: &[f64], rows: usize, cols: usize) -> usize {
        let smax = singular_values.first().copied().unwrap_or(0.0);
        let cut = self.cutoff(smax, rows, cols);
        singular_values.iter().filter(|&&s| s > cut).count()
    }
}

/// Two-sided Jacobi rotation zeroing the off-diagonal entry `b` of the
/// Hermitian 2×2 block `[[a, b], [conj b, c]]`. Returned as
/// `[g_pp, g_pq, g_qp, g_qq]` with `Gᴴ·block·G` diagonal.
fn jacobi_rotation(a: f64, b: C64, c: f64) -> [C64; 4] {
    let abs_b = b.norm();
    let phase = b / abs_b;
    let theta = (c - a) / (2.0 * abs_b);
    let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
    let t = if theta == 0.0 { 1.0 } else { t };
    let cs = 1.0 / t.hypot(1.0);
    let sn = t * cs;
    let e = phase.conj();
    [C64::new(cs, 0.0), C64::new(sn, 0.0), e * (-sn), e * cs]
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Unitary; column `k` is the eigenvector of `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `V · diag(f(λ)) · Vᴴ`.
    pub fn apply_function(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let scaled = ComplexMatrix::from_fn(n, n, |i, k| self.vectors[(i, k)] * f(self.values[k]));
        scaled.mul(&self.vectors.adjoint())
    }
}

pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEigen> {
    if !a.is_square() {
        return Err(Error::NonSquare { rows: a.rows(), cols: a.cols() });
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let scale = a.max_abs();
    let deviation = a.hermitian_deviation();
    if deviation > 1e-12 * scale {
        return Err(Error::NotHermitian { deviation });
    }
    let n = a.rows();
    let mut m = a.symmetrized();
    let mut v = ComplexMatrix::identity(n);
    let floor = 1e-22 * m.frobenius();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let b = m[(p, q)];
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let abs_b = b.norm();
                if abs_b <= 1e-18 * (app.abs() * aqq.abs()).sqrt() || abs_b <= floor {
                    continue;
                }
                let g = jacobi_rotation(app, b, aqq);
                m.rotate_columns(p, q, &g);
                m.rotate_rows_adjoint(p, q, &g);
                v.rotate_columns(p, q, &g);
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
                rotated = true;
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(HermitianEigen { values, vectors })
}

/// Thin singular value decomposition `A = U·diag(σ)·Vᴴ` with
/// `k = min(rows, cols)` singular values in descending order.
#[derive(Debug, Clone)]
pub struct Svd {
    /// rows × k, orthonormal columns.
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    /// cols × k, orthonormal columns.
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let k = self.singular_values.len();
        let us = ComplexMatrix::from_fn(self.u.rows(), k, |i, j| self.u[(i, j)] * self.singular_values[j]);
        us.mul(&self.v.adjoint())
    }
}

pub fn svd(a: &ComplexMatrix) -> Svd {
    if a.rows() < a.cols() {
        let t = svd_tall(&a.adjoint());
        return Svd { u: t.v, singular_values: t.singular_values, v: t.u };
    }
    svd_tall(a)
}

fn svd_tall(a: &ComplexMatrix) -> Svd {
    let (m, n) = (a.rows(), a.cols());
    let mut w = a.clone();
    let mut v = ComplexMatrix::identity(n);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, ZERO);
                for i in 0..m {
                    let x = w[(i, p)];
                    let y = w[(i, q)];
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                let abs_g = gamma.norm();
                if abs_g == 0.0 || abs_g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                let g = jacobi_rotation(alpha, gamma, beta);
                w.rotate_columns(p, q, &g);
                v.rotate_columns(p, q, &g);
                rotated = true;
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..n).map(|j| norm(&w.column(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let singular_values: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let smax = singular_values.first().copied().unwrap_or(0.0);

    let mut u = ComplexMatrix::zeros(m, n);
    let mut vs = ComplexMatrix::zeros(n, n);
    let mut filled = Vec::with_capacity(n);
    for (k, &j) in order.iter().enumerate() {
        for i in 0..n {
            vs[(i, k)] = v[(i, j)];
        }
        let s = norms[j];
        if s > f64::EPSILON * smax * (m as f64) && s > 0.0 {
            for i in 0..m {
                u[(i, k)] = w[(i, j)] / s;
            }
            filled.push(k);
        }
    }
    complete_orthonormal_columns(&mut u, &filled);
    Svd { u, singular_values, v: vs }
}

/// Fills the columns of `u` not listed in `filled` with unit vectors
/// orthogonal to everything already present (Gram–Schmidt against the
/// standard basis, two passes).
fn complete_orthonormal_columns(u: &mut ComplexMatrix, filled: &[usize]) {
    let (m, n) = (u.rows(), u.cols());
    let mut have: Vec<usize> = filled.to_vec();
    let mut candidate = 0usize;
    for k in 0..n {
        if have.contains(&k) {
            continue;
        }
        while candidate < m {
            let mut x = vec![ZERO; m];
            x[candidate] = ONE;
            candidate += 1;
            for _ in 0..2 {
                for &c in &have {
                    let col = u.column(c);
                    let proj = inner(&x, &col);
                    for (xi, ci) in x.iter_mut().zip(&col) {
                        *xi -= proj * ci;
                    }
                }
            }
            let nx = norm(&x);
            if nx > 1e-8 {
                for i in 0..m {
                    u[(i, k)] = x[i] / nx;
                }
                have.push(k);
                break;
            }
        }
    }
}

/// Moore–Penrose pseudoinverse: singular values at or below the policy cutoff
/// are treated as zero.
pub fn pinv(a: &ComplexMatrix, policy: &RankPolicy) -> ComplexMatrix {
    let s = svd(a);
    let cut = policy.cutoff(s.max(), a.rows(), a.cols());
    let k = s.singular_values.len();
    let inv: Vec<f64> = s.singular_values.iter().map(|&x| if x > cut && x > 0.0 { 1.0 / x } else { 0.0 }).collect();
    let vs = ComplexMatrix::from_fn(a.cols(), k, |i, j| s.v[(i, j)] * inv[j]);
    vs.mul(&s.u.adjoint())
}

pub fn rank(a: &ComplexMatrix, policy: &RankPolicy) -> usize {
    let s = svd(a);
    policy.count(&s.singular_values, a.rows(), a.cols())
}

/// Spectral norm `σ_max`.
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    svd(a).max()
}

/// `σ_max / σ_min` of a square matrix; infinite when singular.
pub fn condition_number(a: &ComplexMatrix) -> f64 {
    let s = svd(a);
    let smin = s.singular_values.last().copied().unwrap_or(0.0);
    if smin == 0.0 {
        f64::INFINITY
    } else {
        s.max() / smin
    }
}
