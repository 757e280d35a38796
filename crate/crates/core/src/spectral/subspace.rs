use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Matrix};
use crate::scalar::Real;
use crate::sector::{dot, SectorBasis, SectorVector};
use crate::states::{build_droplet, ring_droplet, DropletSpec, RingDropletSpec};

/// A finite family of normalised vectors in one sector together with its
/// Gram matrix.
#[derive(Debug, Clone)]
pub struct DropletFamily<T> {
    members: Vec<SectorVector<T>>,
    labels: Vec<usize>,
    gram: Matrix<T>,
}

impl<T: Real> DropletFamily<T> {
    /// Normalises the members and records their Gram matrix; labels default
    /// to positions in the list.
    pub fn from_members(members: Vec<SectorVector<T>>) -> Result<Self> {
        let labels = (0..members.len()).collect();
        Self::labelled(members, labels)
    }

    fn labelled(members: Vec<SectorVector<T>>, labels: Vec<usize>) -> Result<Self> {
        let first = members.first().ok_or_else(|| Error::Domain("empty family".into()))?;
        let mut normed = Vec::with_capacity(members.len());
        for m in &members {
            first.check_same_basis(m)?;
            normed.push(m.normalized()?);
        }
        let r = normed.len();
        let mut gram = Matrix::zeros(r, r);
        for i in 0..r {
            for j in i..r {
                let g = dot(&normed[i].amplitudes, &normed[j].amplitudes);
                gram[(i, j)] = g;
                gram[(j, i)] = g;
            }
        }
        Ok(Self { members: normed, labels, gram })
    }

    /// The normalised droplets ξ_{L,n}(x) for every admissible x.
    pub fn droplets(l: usize, n: usize, q: T) -> Result<Self> {
        let specs = DropletSpec::all(l, n)?;
        let members = specs.iter().map(|s| build_droplet(s, q)).collect::<Result<Vec<_>>>()?;
        Self::labelled(members, specs.iter().map(|s| s.x).collect())
    }

    /// The L translates T^x ξ_{L,n}(⌊L/2⌋) on the ring, x = 0..L−1.
    pub fn ring_droplets(l: usize, n: usize, q: T) -> Result<Self> {
        let members = (0..l)
            .map(|x| ring_droplet(&RingDropletSpec::new(l, n, x)?, q))
            .collect::<Result<Vec<_>>>()?;
        Self::labelled(members, (0..l).collect())
    }

    pub fn members(&self) -> &[SectorVector<T>] {
        &self.members
    }

    /// Cut position (or ring shift) of each member.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.members[0].basis
    }

    pub fn gram(&self) -> &Matrix<T> {
        &self.gram
    }

    /// F v = Σ_x f_x ⟨f_x, v⟩.
    pub fn frame_apply(&self, v: &SectorVector<T>) -> Result<SectorVector<T>> {
        let mut out = SectorVector::zeros(self.basis().clone());
        for f in &self.members {
            out.axpy(f.dot(v)?, f)?;
        }
        Ok(out)
    }

    /// Dense F = Σ_x |f_x⟩⟨f_x| on the whole sector.
    pub fn frame_dense(&self) -> Matrix<T> {
        let d = self.basis().dim();
        let mut m = Matrix::zeros(d, d);
        for f in &self.members {
            let a = &f.amplitudes;
            for i in 0..d {
                if a[i] == T::zero() {
                    continue;
                }
                let row = m.row_mut(i);
                for (r, &aj) in row.iter_mut().zip(a) {
                    *r = *r + a[i] * aj;
                }
            }
        }
        m
    }
}

/// Orthogonal projector given by an orthonormal basis of its range.
#[derive(Debug, Clone)]
pub struct SubspaceProjector<T> {
    basis: Arc<SectorBasis>,
    vectors: Vec<SectorVector<T>>,
}

impl<T: Real> SubspaceProjector<T> {
    /// The zero projector on a sector.
    pub fn zero(basis: Arc<SectorBasis>) -> Self {
        Self { basis, vectors: Vec::new() }
    }

    /// Trusts the caller that `vectors` are orthonormal.
    pub fn from_orthonormal(vectors: Vec<SectorVector<T>>) -> Result<Self> {
        let first = vectors.first().ok_or_else(|| Error::Domain("no vectors; use SubspaceProjector::zero".into()))?;
        for v in &vectors {
            first.check_same_basis(v)?;
        }
        Ok(Self { basis: first.basis.clone(), vectors })
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[SectorVector<T>] {
        &self.vectors
    }

    pub fn apply(&self, v: &SectorVector<T>) -> Result<SectorVector<T>> {
        if !self.basis.same_as(&v.basis) {
            return Err(Error::Mismatch("vector lives in a different sector".into()));
        }
        let mut out = SectorVector::zeros(self.basis.clone());
        for u in &self.vectors {
            out.axpy(dot(&u.amplitudes, &v.amplitudes), u)?;
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> Matrix<T> {
        let d = self.basis.dim();
        let mut m = Matrix::zeros(d, d);
        for u in &self.vectors {
            let a = &u.amplitudes;
            for i in 0..d {
                let row = m.row_mut(i);
                for (r, &aj) in row.iter_mut().zip(a) {
                    *r = *r + a[i] * aj;
                }
            }
        }
        m
    }

    /// ‖F P‖ for a linear map F given by its action on sector vectors.
    pub fn image_norm<F>(&self, f: F) -> Result<T>
    where
        F: Fn(&SectorVector<T>) -> Result<SectorVector<T>>,
    {
        let images = self.vectors.iter().map(&f).collect::<Result<Vec<_>>>()?;
        Ok(max_singular(&images))
    }

    /// Deviation of the basis from orthonormality, max |⟨u_i,u_j⟩ − δ_ij|.
    pub fn orthonormality_error(&self) -> T {
        let mut e = T::zero();
        for (i, u) in self.vectors.iter().enumerate() {
            for (j, w) in self.vectors.iter().enumerate().skip(i) {
                let d = if i == j { T::one() } else { T::zero() };
                e = e.max((dot(&u.amplitudes, &w.amplitudes) - d).abs());
            }
        }
        e
    }
}

/// Largest singular value of the matrix whose columns are `cols`.
fn max_singular<T: Real>(cols: &[SectorVector<T>]) -> T {
    let r = cols.len();
    if r == 0 {
        return T::zero();
    }
    let mut g = Matrix::zeros(r, r);
    for i in 0..r {
        for j in i..r {
            let v = dot(&cols[i].amplitudes, &cols[j].amplitudes);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    let e = symmetric_eigen(g, false).expect("small Gram eigensolve");
    e.values.last().copied().unwrap_or(T::zero()).max(T::zero()).sqrt()
}

/// Orthonormalises the family through the eigen-decomposition of its Gram
/// matrix, u_i = λ_i^{-1/2} Σ_x w_{xi} f_x.
pub fn gram_projector<T: Real>(family: &DropletFamily<T>) -> Result<SubspaceProjector<T>> {
    let eig = symmetric_eigen(family.gram().clone(), true)?;
    let lmin = eig.values[0];
    if lmin <= T::lit(1e-12) {
        return Err(Error::RankDeficient { min_eigenvalue: lmin.to_f64_lossy() });
    }
    let w = eig.vectors.expect("requested vectors");
    let vectors = eig
        .values
        .iter()
        .enumerate()
        .map(|(i, &lam)| {
            let mut u = SectorVector::zeros(family.basis().clone());
            let s = T::one() / lam.sqrt();
            for (x, f) in family.members().iter().enumerate() {
                u.axpy(w[(i, x)] * s, f)?;
            }
            Ok(u)
        })
        .collect::<Result<Vec<_>>>()?;
    SubspaceProjector::from_orthonormal(vectors)
}

/// ‖P − Q‖ in operator norm. Equal ranks give ‖(I − P)Q‖ computed from
/// explicit residual vectors, which keeps small distances accurate; unequal
/// ranks give exactly 1.
pub fn projector_distance<T: Real>(p: &SubspaceProjector<T>, q: &SubspaceProjector<T>) -> Result<T> {
    if !p.basis.same_as(&q.basis) {
        return Err(Error::Mismatch("projectors act on different sectors".into()));
    }
    if p.rank() != q.rank() {
        return Ok(T::one());
    }
    let residuals = q
        .vectors
        .iter()
        .map(|w| {
            let mut r = w.clone();
            for u in &p.vectors {
                let c = dot(&u.amplitudes, &r.amplitudes);
                r.axpy(-c, u)?;
            }
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(max_singular(&residuals).min(T::one()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(basis: &Arc<SectorBasis>, amps: &[f64]) -> SectorVector<f64> {
        SectorVector::from_amplitudes(basis.clone(), amps.to_vec()).unwrap().normalized().unwrap()
    }

    #[test]
    fn rotated_lines() {
        let b = SectorBasis::chain(3, 1).unwrap();
        let theta = 1e-9f64;
        let p = SubspaceProjector::from_orthonormal(vec![unit(&b, &[1.0, 0.0, 0.0])]).unwrap();
        let q = SubspaceProjector::from_orthonormal(vec![unit(&b, &[theta.cos(), theta.sin(), 0.0])]).unwrap();
        let d = projector_distance(&p, &q).unwrap();
        assert!((d - theta.sin()).abs() < 1e-20);
        let two = SubspaceProjector::from_orthonormal(vec![unit(&b, &[1.0, 0.0, 0.0]), unit(&b, &[0.0, 1.0, 0.0])]).unwrap();
        assert_eq!(projector_distance(&p, &two).unwrap(), 1.0);
        assert_eq!(projector_distance(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn gram_projector_spans_family() {
        let fam = DropletFamily::droplets(8, 3, 0.4f64).unwrap();
        let p = gram_projector(&fam).unwrap();
        assert_eq!(p.rank(), fam.len());
        assert!(p.orthonormality_error() < 1e-12);
        for f in fam.members() {
            assert!(p.apply(f).unwrap().max_abs_diff(f).unwrap() < 1e-12);
        }
    }

    #[test]
    fn rank_deficiency_detected() {
        let b = SectorBasis::chain(3, 1).unwrap();
        let v = unit(&b, &[1.0, 2.0, 3.0]);
        let fam = DropletFamily::from_members(vec![v.clone(), v.scaled(2.0)]).unwrap();
        assert!(matches!(gram_projector(&fam), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn frame_dense_matches_apply() {
        let fam = DropletFamily::droplets(6, 2, 0.3f64).unwrap();
        let m = fam.frame_dense();
        let v = SectorVector::from_fn(fam.basis().clone(), |mask| (mask % 7) as f64 - 3.0);
        let a = fam.frame_apply(&v).unwrap();
        let b = m.matvec(&v.amplitudes);
        for (x, y) in a.amplitudes.iter().zip(&b) {
            assert!((x - y).abs() < 1e-13);
        }
    }
}
