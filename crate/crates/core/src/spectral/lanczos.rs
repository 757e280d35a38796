//! Thick-restart Lanczos with full reorthogonalisation and locking.
//!
//! Each run builds a Krylov basis for the operator deflated by the locked
//! eigenvectors, keeps the wanted Ritz vectors plus the next Lanczos vector
//! on restart, and stops once the wanted Ritz pairs have true residuals
//! below the tolerance. Converged pairs are locked. Once k pairs are locked,
//! further deflated runs from fresh random vectors continue until their
//! lowest converged Ritz value is no smaller than the k-th locked value, so
//! a partner hidden in an exactly degenerate eigenspace is not skipped.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Matrix};
use crate::scalar::Real;
use crate::sector::dot;

use super::LinearOperator;

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions<T> {
    /// Absolute bound on ‖Av − λv‖ for accepted pairs.
    pub tol: T,
    pub seed: u64,
    /// Krylov dimension per restart (clamped to the deflated dimension).
    pub max_krylov: usize,
    /// Cap on the total number of restarts across all runs.
    pub max_restarts: usize,
}

impl<T: Real> Default for LanczosOptions<T> {
    fn default() -> Self {
        Self { tol: T::lit(1e-9), seed: 0, max_krylov: 64, max_restarts: 2000 }
    }
}

fn axpy<T: Real>(y: &mut [T], a: T, x: &[T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = *yi + a * xi;
    }
}

fn norm<T: Real>(x: &[T]) -> T {
    dot(x, x).sqrt()
}

fn normalize<T: Real>(x: &mut [T]) -> T {
    let nr = norm(x);
    if nr > T::zero() {
        x.iter_mut().for_each(|v| *v = *v / nr);
    }
    nr
}

/// Two passes of classical Gram-Schmidt against `basis`, returning the
/// accumulated coefficients.
fn orthogonalize<T: Real>(w: &mut [T], basis: &[Vec<T>]) -> Vec<T> {
    let mut coef = vec![T::zero(); basis.len()];
    for _ in 0..2 {
        for (c, b) in coef.iter_mut().zip(basis) {
            let d = dot(b, w);
            axpy(w, -d, b);
            *c = *c + d;
        }
    }
    coef
}

/// Ritz pairs found by one run, ascending.
struct Run<T> {
    values: Vec<T>,
    vectors: Vec<Vec<T>>,
    /// True residuals of `vectors`.
    residuals: Vec<T>,
}

fn ritz_vectors<T: Real>(basis: &[Vec<T>], s: &Matrix<T>, count: usize, n: usize) -> Vec<Vec<T>> {
    (0..count)
        .map(|i| {
            let mut y = vec![T::zero(); n];
            for (c, bv) in basis.iter().enumerate() {
                axpy(&mut y, s[(i, c)], bv);
            }
            normalize(&mut y);
            y
        })
        .collect()
}

/// One thick-restart run targeting the `want` lowest eigenpairs of the
/// operator deflated by `locked`. Returns every Ritz pair of the final
/// subspace that is cheap to report: all of them on an invariant subspace,
/// otherwise the wanted ones.
fn run<T: Real, A: LinearOperator<T> + ?Sized>(
    op: &A,
    locked: &[Vec<T>],
    start: Vec<T>,
    want: usize,
    m_max: usize,
    tol: T,
    restarts_left: &mut usize,
) -> Option<Run<T>> {
    let n = op.dim();
    let keep = (want + 8).min(m_max.saturating_sub(4)).max(want);
    let mut basis: Vec<Vec<T>> = vec![start];
    // proj[i][j] = ⟨v_i, A v_j⟩ for i ≤ j.
    let mut proj: Matrix<T> = Matrix::zeros(m_max + 1, m_max + 1);
    let mut done_cols = 0usize;
    let mut w = vec![T::zero(); n];
    loop {
        let mut beta = T::zero();
        let mut breakdown = false;
        let mut scale = T::zero();
        while done_cols < m_max {
            let j = done_cols;
            op.apply(&basis[j], &mut w);
            orthogonalize(&mut w, locked);
            let coef = orthogonalize(&mut w, &basis);
            for (i, &c) in coef.iter().enumerate() {
                if i <= j {
                    proj[(i, j)] = proj[(i, j)] + c;
                }
            }
            orthogonalize(&mut w, locked);
            beta = norm(&w);
            done_cols += 1;
            scale = scale.max(proj[(j, j)].abs() + beta);
            if beta <= T::lit(1e-13) * scale.max(T::one()) {
                breakdown = true;
                break;
            }
            basis.push(w.iter().map(|&x| x / beta).collect());
        }
        let m = done_cols;
        let t = Matrix::from_fn(m, m, |r, c| if r <= c { proj[(r, c)] } else { proj[(c, r)] });
        let eig = symmetric_eigen(t, true).ok()?;
        let s = eig.vectors.expect("requested vectors");
        let exhausted = breakdown || m + locked.len() >= n;
        let want_here = want.min(m);
        let est = |i: usize| (beta * s[(i, m - 1)]).abs();
        let converged = exhausted || (0..want_here).all(|i| est(i) <= tol * T::lit(0.1));
        if converged {
            let count = if exhausted { m } else { want_here };
            let vectors = ritz_vectors(&basis[..m], &s, count, n);
            let values = eig.values[..count].to_vec();
            let residuals = values.iter().zip(&vectors).map(|(&l, v)| residual(op, l, v)).collect();
            return Some(Run { values, vectors, residuals });
        }
        if *restarts_left == 0 {
            let vectors = ritz_vectors(&basis[..m], &s, want_here, n);
            let values = eig.values[..want_here].to_vec();
            let residuals = values.iter().zip(&vectors).map(|(&l, v)| residual(op, l, v)).collect();
            return Some(Run { values, vectors, residuals });
        }
        *restarts_left -= 1;
        // Thick restart: keep the lowest Ritz vectors and the next Lanczos
        // vector, whose couplings to them are β s_{m,i}.
        let kept = keep.min(m - 1).max(1);
        let mut next_basis = ritz_vectors(&basis[..m], &s, kept, n);
        next_basis.push(basis.pop().expect("next Lanczos vector"));
        let mut next_proj = Matrix::zeros(m_max + 1, m_max + 1);
        for i in 0..kept {
            next_proj[(i, i)] = eig.values[i];
        }
        basis = next_basis;
        proj = next_proj;
        done_cols = kept;
    }
}

fn residual<T: Real, A: LinearOperator<T> + ?Sized>(op: &A, lambda: T, v: &[T]) -> T {
    let mut av = vec![T::zero(); v.len()];
    op.apply(v, &mut av);
    av.iter().zip(v).map(|(&a, &b)| (a - lambda * b) * (a - lambda * b)).sum::<T>().sqrt()
}

fn random_start<T: Real>(rng: &mut ChaCha8Rng, n: usize, locked: &[Vec<T>]) -> Option<Vec<T>> {
    for _ in 0..4 {
        let mut v: Vec<T> = (0..n).map(|_| T::lit(rng.random_range(-1.0..1.0))).collect();
        orthogonalize(&mut v, locked);
        let nr = norm(&v);
        if nr > T::lit(1e-8) {
            v.iter_mut().for_each(|x| *x = *x / nr);
            return Some(v);
        }
    }
    None
}

/// The `k` lowest eigenpairs of a symmetric operator, ascending.
pub fn lanczos_lowest<T: Real, A: LinearOperator<T> + ?Sized>(
    op: &A,
    k: usize,
    opts: &LanczosOptions<T>,
) -> Result<(Vec<T>, Vec<Vec<T>>)> {
    let n = op.dim();
    if k == 0 {
        return Err(Error::Range("k must be at least 1".into()));
    }
    if k > n {
        return Err(Error::Range(format!("k = {k} exceeds the dimension {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut locked_vals: Vec<T> = Vec::new();
    let mut locked: Vec<Vec<T>> = Vec::new();
    let mut restarts_left = opts.max_restarts;
    let mut worst = T::zero();
    let mut runs_left = 4 * k + 64;

    loop {
        if runs_left == 0 {
            return Err(not_converged(&locked_vals, k, worst));
        }
        runs_left -= 1;
        let free = n - locked.len();
        if free == 0 {
            return Ok(finish(locked_vals, locked, k));
        }
        let verifying = locked.len() >= k;
        let start = match random_start(&mut rng, n, &locked) {
            Some(v) => v,
            None => return Ok(finish(locked_vals, locked, k)),
        };
        let want = if verifying { 1 } else { k - locked.len() };
        let m_max = opts.max_krylov.max(2 * want + 16).min(free);
        let r = match run(op, &locked, start, want, m_max, opts.tol, &mut restarts_left) {
            Some(r) => r,
            None => return Err(not_converged(&locked_vals, k, worst)),
        };
        let ok: Vec<usize> = (0..r.values.len()).filter(|&i| r.residuals[i] <= opts.tol).collect();
        if let Some(bad) = (0..r.values.len().min(want)).map(|i| r.residuals[i]).filter(|&x| x > opts.tol).reduce(T::max) {
            worst = bad;
        }
        if verifying {
            let kth = sorted_kth(&locked_vals, k);
            let lower = ok.iter().any(|&i| r.values[i] < kth - opts.tol);
            if !lower && !ok.is_empty() {
                return Ok(finish(locked_vals, locked, k));
            }
        }
        let before = locked.len();
        for &i in &ok {
            let mut v = r.vectors[i].clone();
            orthogonalize(&mut v, &locked);
            if normalize(&mut v) < T::lit(0.5) {
                continue;
            }
            locked_vals.push(r.values[i]);
            locked.push(v);
        }
        if locked.len() == before && restarts_left == 0 {
            return Err(not_converged(&locked_vals, k, worst));
        }
    }
}

fn sorted_kth<T: Real>(vals: &[T], k: usize) -> T {
    let mut v = vals.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    v[k - 1]
}

fn finish<T: Real>(vals: Vec<T>, vecs: Vec<Vec<T>>, k: usize) -> (Vec<T>, Vec<Vec<T>>) {
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap_or(std::cmp::Ordering::Equal));
    order.truncate(k);
    (order.iter().map(|&i| vals[i]).collect(), order.iter().map(|&i| vecs[i].clone()).collect())
}

fn not_converged<T: Real>(vals: &[T], k: usize, worst: T) -> Error {
    let mut partial: Vec<f64> = vals.iter().map(|v| v.to_f64_lossy()).collect();
    partial.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Error::NotConverged {
        wanted: k,
        converged: vals.len().min(k),
        partial_eigenvalues: partial,
        worst_residual: worst.to_f64_lossy(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(values: &[f64]) -> Matrix<f64> {
        let mut m = Matrix::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    #[test]
    fn finds_degenerate_lowest() {
        let vals: Vec<f64> = (0..200).map(|i| if i < 3 { -1.0 } else { i as f64 * 0.01 }).collect();
        let m = diag(&vals);
        let (ev, vecs) = lanczos_lowest(&m, 5, &LanczosOptions::default()).unwrap();
        assert_eq!(vecs.len(), 5);
        for (got, want) in ev.iter().zip([-1.0, -1.0, -1.0, 0.03, 0.04]) {
            assert!((got - want).abs() < 1e-9, "{ev:?}");
        }
    }

    #[test]
    fn tiny_operator_full_spectrum() {
        let m = diag(&[3.0, 1.0, 2.0]);
        let (ev, _) = lanczos_lowest(&m, 3, &LanczosOptions::default()).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[2] - 3.0).abs() < 1e-12);
        assert!(lanczos_lowest(&m, 4, &LanczosOptions::default()).is_err());
        assert!(lanczos_lowest(&m, 0, &LanczosOptions::default()).is_err());
    }

    #[test]
    fn deterministic_for_seed() {
        let m = Matrix::from_fn(60, 60, |i, j| 1.0 / (1.0 + (i as f64 - j as f64).abs()) + if i == j { i as f64 } else { 0.0 });
        let opts = LanczosOptions { seed: 11, ..LanczosOptions::default() };
        let a = lanczos_lowest(&m, 4, &opts).unwrap();
        let b = lanczos_lowest(&m, 4, &opts).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
    }
}
