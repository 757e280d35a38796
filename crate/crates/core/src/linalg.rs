//! Dense row-major matrices and a symmetric eigensolver.
//!
//! The eigensolver reduces to tridiagonal form with Householder reflections
//! and then runs implicit QL with Wilkinson-type shifts. Eigenvectors are
//! kept as rows of the transposed basis so every plane rotation touches two
//! contiguous rows.

use std::ops::{Index, IndexMut};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sector::dot;

/// Row count above which row-parallel kernels are used.
const PAR_ROWS: usize = 128;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Mismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Mismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                let orow = other.row(k);
                let dst = out.row_mut(i);
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d = *d + a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Mismatch("matrix shapes differ".into()));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect(),
        })
    }

    pub fn scale(&self, s: T) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| a * s).collect() }
    }

    /// max |A_ij − A_ji|.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &a| m.max(a.abs()))
    }

    /// Spectral norm of a symmetric matrix, max |λ|.
    pub fn symmetric_norm(&self) -> Result<T> {
        let e = symmetric_eigen(self.clone(), false)?;
        Ok(e.values.iter().fold(T::zero(), |m, &v| m.max(v.abs())))
    }

    /// Spectral norm of an arbitrary matrix via the smaller Gram product.
    pub fn spectral_norm(&self) -> Result<T> {
        let g = if self.rows >= self.cols {
            self.transpose().matmul(self)?
        } else {
            self.matmul(&self.transpose())?
        };
        let e = symmetric_eigen(g, false)?;
        Ok(e.values.last().copied().unwrap_or(T::zero()).max(T::zero()).sqrt())
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    /// Ascending eigenvalues.
    pub values: Vec<T>,
    /// Row k is the unit eigenvector of `values[k]`.
    pub vectors: Option<Matrix<T>>,
}

/// Full spectrum of a symmetric matrix (only the lower triangle is trusted
/// to be consistent with the upper one; the input should be symmetric).
pub fn symmetric_eigen<T: Real>(a: Matrix<T>, want_vectors: bool) -> Result<SymmetricEigen<T>> {
    if !a.is_square() {
        return Err(Error::Mismatch(format!("{}x{} matrix is not square", a.rows, a.cols)));
    }
    let n = a.rows;
    if n == 0 {
        return Ok(SymmetricEigen { values: vec![], vectors: want_vectors.then(|| Matrix::zeros(0, 0)) });
    }
    let (mut d, mut e, zt) = tridiagonalize(a, want_vectors);
    let mut zt = zt;
    tridiagonal_ql(&mut d, &mut e, zt.as_mut())?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = zt.map(|z| {
        let mut out = Matrix::zeros(n, n);
        for (k, &i) in order.iter().enumerate() {
            out.row_mut(k).copy_from_slice(z.row(i));
        }
        out
    });
    Ok(SymmetricEigen { values, vectors })
}

/// Householder reduction A = Q T Qᵀ. Returns the diagonal, the subdiagonal
/// (e[i] = T[i+1][i], last entry 0) and optionally Qᵀ.
fn tridiagonalize<T: Real>(mut a: Matrix<T>, want_q: bool) -> (Vec<T>, Vec<T>, Option<Matrix<T>>) {
    let n = a.rows;
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    let mut reflectors: Vec<(Vec<T>, T)> = Vec::new();
    let mut p = vec![T::zero(); n];

    for k in 0..n.saturating_sub(2) {
        let lo = k + 1;
        let m = n - lo;
        let mut v: Vec<T> = (lo..n).map(|i| a[(i, k)]).collect();
        let tail: T = v[1..].iter().map(|&x| x * x).sum();
        let x0 = v[0];
        if tail == T::zero() {
            e[k] = x0;
            if want_q {
                reflectors.push((Vec::new(), T::zero()));
            }
            continue;
        }
        let norm = (x0 * x0 + tail).sqrt();
        let alpha = if x0 >= T::zero() { -norm } else { norm };
        v[0] = x0 - alpha;
        let vtv = v[0] * v[0] + tail;
        let beta = T::lit(2.0) / vtv;
        e[k] = alpha;

        // p = β A₂₂ v
        {
            let src = &a.data;
            let cols = a.cols;
            let pv = &mut p[..m];
            let kernel = |(i, out): (usize, &mut T)| {
                let row = &src[(lo + i) * cols + lo..(lo + i + 1) * cols];
                *out = beta * dot(row, &v);
            };
            if m >= PAR_ROWS {
                pv.par_iter_mut().enumerate().for_each(kernel);
            } else {
                pv.iter_mut().enumerate().for_each(kernel);
            }
        }
        // w = p − (β/2)(pᵀv) v, then A₂₂ −= v wᵀ + w vᵀ
        let kcoef = beta / T::lit(2.0) * dot(&p[..m], &v);
        let w: Vec<T> = (0..m).map(|i| p[i] - kcoef * v[i]).collect();
        {
            let cols = a.cols;
            let block = &mut a.data[lo * cols..];
            let kernel = |(i, row): (usize, &mut [T])| {
                let vi = v[i];
                let wi = w[i];
                for (j, x) in row[lo..].iter_mut().enumerate() {
                    *x = *x - vi * w[j] - wi * v[j];
                }
            };
            if m >= PAR_ROWS {
                block.par_chunks_mut(cols).enumerate().for_each(kernel);
            } else {
                block.chunks_mut(cols).enumerate().for_each(kernel);
            }
        }
        if want_q {
            reflectors.push((v, beta));
        }
    }
    for i in 0..n {
        d[i] = a[(i, i)];
    }
    if n >= 2 {
        e[n - 2] = a[(n - 1, n - 2)];
    }
    e[n - 1] = T::zero();

    let qt = want_q.then(|| {
        // Backward accumulation of Qᵀ: W ← W P_k for k descending.
        let mut w = Matrix::identity(n);
        for (k, (v, beta)) in reflectors.iter().enumerate().rev() {
            if v.is_empty() {
                continue;
            }
            let lo = k + 1;
            let cols = w.cols;
            let block = &mut w.data[lo * cols..];
            let kernel = |row: &mut [T]| {
                let s = *beta * dot(&row[lo..], v);
                if s != T::zero() {
                    for (x, &vj) in row[lo..].iter_mut().zip(v) {
                        *x = *x - s * vj;
                    }
                }
            };
            if n - lo >= PAR_ROWS {
                block.par_chunks_mut(cols).for_each(kernel);
            } else {
                block.chunks_mut(cols).for_each(kernel);
            }
        }
        w
    });
    (d, e, qt)
}

/// Implicit QL on a symmetric tridiagonal matrix; rotations are applied to
/// the rows of `zt` when present.
fn tridiagonal_ql<T: Real>(d: &mut [T], e: &mut [T], mut zt: Option<&mut Matrix<T>>) -> Result<()> {
    let n = d.len();
    let eps = T::eps();
    let mut f = T::zero();
    let mut tst1 = T::zero();
    let max_sweeps = 60 * n.max(1);
    let mut sweeps = 0usize;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            loop {
                sweeps += 1;
                if sweeps > max_sweeps {
                    return Err(Error::NotConverged {
                        wanted: n,
                        converged: l,
                        partial_eigenvalues: d[..l].iter().map(|v| v.to_f64_lossy()).collect(),
                        worst_residual: e[l].abs().to_f64_lossy(),
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (T::lit(2.0) * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di = *di - h;
                }
                f = f + h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = zt.as_deref_mut() {
                        let cols = z.cols;
                        let (head, tail) = z.data.split_at_mut((i + 1) * cols);
                        let zi = &mut head[i * cols..];
                        let zi1 = &mut tail[..cols];
                        for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                            let hb = *b;
                            *b = s * *a + c * hb;
                            *a = c * *a - s * hb;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] = d[l] + f;
        e[l] = T::zero();
    }
    Ok(())
}
