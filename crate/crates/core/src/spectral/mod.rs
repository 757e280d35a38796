//! Eigensolvers for sector Hamiltonians, the droplet family with its Gram
//! projector, and distances between subspace projectors.

mod lanczos;
mod subspace;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Matrix};
use crate::operators::{Hamiltonian, SectorHamiltonian};
use crate::scalar::Real;
use crate::sector::{SectorBasis, SectorVector};

pub use lanczos::{lanczos_lowest, LanczosOptions};
pub use subspace::{gram_projector, projector_distance, DropletFamily, SubspaceProjector};

/// A symmetric operator known only through its action.
pub trait LinearOperator<T: Real>: Sync {
    fn dim(&self) -> usize;
    /// y = A x.
    fn apply(&self, x: &[T], y: &mut [T]);
}

impl<T: Real> LinearOperator<T> for SectorHamiltonian<T> {
    fn dim(&self) -> usize {
        SectorHamiltonian::dim(self)
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        self.apply_into(x, y)
    }
}

impl<T: Real> LinearOperator<T> for Matrix<T> {
    fn dim(&self) -> usize {
        self.rows()
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        y.copy_from_slice(&self.matvec(x));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Solver {
    Dense,
    Lanczos,
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Solver::Dense => "dense",
            Solver::Lanczos => "lanczos",
        })
    }
}

impl FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(Solver::Dense),
            "lanczos" | "iterative" => Ok(Solver::Lanczos),
            _ => Err(Error::Domain(format!("unknown solver '{s}' (expected dense or lanczos)"))),
        }
    }
}

/// Ascending eigenvalues with optional eigenvectors and their residuals.
#[derive(Debug, Clone)]
pub struct EigenResult<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Option<Vec<SectorVector<T>>>,
    /// ‖Hv − λv‖ per returned eigenvector (empty without vectors).
    pub residuals: Vec<T>,
    pub solver: Solver,
    pub tolerance: T,
}

impl<T: Real> EigenResult<T> {
    /// Orthogonal projector onto the span of the first `count` eigenvectors.
    pub fn lowest_projector(&self, count: usize) -> Result<SubspaceProjector<T>> {
        let vecs = self
            .eigenvectors
            .as_ref()
            .ok_or_else(|| Error::Mismatch("eigenvectors were not computed".into()))?;
        if count > vecs.len() {
            return Err(Error::Range(format!("{count} eigenvectors requested, {} available", vecs.len())));
        }
        SubspaceProjector::from_orthonormal(vecs[..count].to_vec())
    }
}

fn residual_norm<T: Real>(op: &SectorHamiltonian<T>, lambda: T, v: &[T]) -> T {
    let mut hv = vec![T::zero(); v.len()];
    op.apply_into(v, &mut hv);
    hv.iter().zip(v).map(|(&a, &b)| (a - lambda * b) * (a - lambda * b)).sum::<T>().sqrt()
}

/// Full spectrum of `h` on `basis` by dense diagonalisation.
pub fn eig_dense<T: Real>(h: &Hamiltonian<T>, basis: Arc<SectorBasis>, want_vectors: bool) -> Result<EigenResult<T>> {
    let op = h.on(basis.clone())?;
    let m = op.to_dense()?;
    let eig = symmetric_eigen(m, want_vectors)?;
    let (eigenvectors, residuals) = match eig.vectors {
        Some(z) => {
            let mut vs = Vec::with_capacity(z.rows());
            let mut rs = Vec::with_capacity(z.rows());
            for (k, &lam) in eig.values.iter().enumerate() {
                let v = z.row(k).to_vec();
                rs.push(residual_norm(&op, lam, &v));
                vs.push(SectorVector::from_amplitudes(basis.clone(), v)?);
            }
            (Some(vs), rs)
        }
        None => (None, Vec::new()),
    };
    Ok(EigenResult {
        eigenvalues: eig.values,
        eigenvectors,
        residuals,
        solver: Solver::Dense,
        tolerance: T::eps(),
    })
}

/// The `k` lowest eigenpairs of `h` on `basis` by restarted Lanczos with
/// full reorthogonalisation and a start vector drawn from `seed`.
pub fn eig_lowest<T: Real>(
    h: &Hamiltonian<T>,
    basis: Arc<SectorBasis>,
    k: usize,
    tol: T,
    seed: u64,
) -> Result<EigenResult<T>> {
    let op = h.on(basis.clone())?;
    let opts = LanczosOptions { tol, seed, ..LanczosOptions::default() };
    let (values, vectors) = lanczos_lowest(&op, k, &opts)?;
    let mut residuals = Vec::with_capacity(k);
    let mut vs = Vec::with_capacity(k);
    for (&lam, v) in values.iter().zip(vectors) {
        residuals.push(residual_norm(&op, lam, &v));
        vs.push(SectorVector::from_amplitudes(basis.clone(), v)?);
    }
    Ok(EigenResult { eigenvalues: values, eigenvectors: Some(vs), residuals, solver: Solver::Lanczos, tolerance: tol })
}

/// Either solver behind one call; `k = None` asks for the full spectrum
/// (dense only).
pub fn eig_with<T: Real>(
    solver: Solver,
    h: &Hamiltonian<T>,
    basis: Arc<SectorBasis>,
    k: Option<usize>,
    tol: T,
    seed: u64,
) -> Result<EigenResult<T>> {
    match solver {
        Solver::Dense => {
            let mut r = eig_dense(h, basis, false)?;
            if let Some(k) = k {
                r.eigenvalues.truncate(k);
            }
            Ok(r)
        }
        Solver::Lanczos => {
            let dim = basis.dim();
            let k = k.unwrap_or(dim).min(dim);
            eig_lowest(h, basis, k, tol, seed)
        }
    }
}

/// ⟨v,Hv⟩/⟨v,v⟩.
pub fn rayleigh<T: Real>(v: &SectorVector<T>, h: &Hamiltonian<T>) -> Result<T> {
    h.rayleigh(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::Boundary;
    use crate::qcore::AnisotropyParams;

    #[test]
    fn kink_gap_small_chain() {
        let p = AnisotropyParams::from_q(0.25f64).unwrap();
        let h = Hamiltonian::chain(4, Boundary::KINK, p).unwrap();
        let r = eig_dense(&h, SectorBasis::chain(4, 2).unwrap(), true).unwrap();
        assert!(r.eigenvalues[0].abs() < 1e-12);
        assert!((r.eigenvalues[1] - r.eigenvalues[0] - crate::qcore::kink_gap(4, p.delta).unwrap()).abs() < 1e-12);
        assert!(r.residuals.iter().all(|&x| x < 1e-12));
    }

    #[test]
    fn lanczos_agrees_with_dense() {
        let p = AnisotropyParams::from_q(0.3f64).unwrap();
        for bc in [Boundary::DROPLET, Boundary::KINK, Boundary::RING] {
            let h = Hamiltonian::chain(10, bc, p).unwrap();
            let basis = SectorBasis::chain(10, 4).unwrap();
            let d = eig_dense(&h, basis.clone(), false).unwrap();
            let l = eig_lowest(&h, basis, 8, 1e-10, 3).unwrap();
            for (a, b) in d.eigenvalues.iter().zip(&l.eigenvalues) {
                assert!((a - b).abs() < 1e-9, "{bc}: {a} vs {b}");
            }
            assert!(l.residuals.iter().all(|&r| r <= 1e-10));
        }
    }

    #[test]
    fn solver_names() {
        assert_eq!("dense".parse::<Solver>().unwrap(), Solver::Dense);
        assert_eq!("iterative".parse::<Solver>().unwrap(), Solver::Lanczos);
        assert!("qr".parse::<Solver>().is_err());
    }

    #[test]
    fn rayleigh_of_all_up() {
        let p = AnisotropyParams::from_q(0.25f64).unwrap();
        let h = Hamiltonian::chain(6, Boundary::DROPLET, p).unwrap();
        let v = SectorVector::basis_state(SectorBasis::chain(6, 0).unwrap(), 0).scaled(3.0);
        assert!((rayleigh(&v, &h).unwrap() + p.a_field).abs() < 1e-15);
        let z = SectorVector::<f64>::zeros(SectorBasis::chain(6, 1).unwrap());
        assert!(matches!(rayleigh(&z, &h), Err(Error::ZeroVector)));
    }
}
