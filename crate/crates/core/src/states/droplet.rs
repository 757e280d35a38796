use crate::error::{Error, Result};
use crate::operators::{Boundary, Hamiltonian};
use crate::qcore::{binom_f, qbinom, AnisotropyParams};
use crate::scalar::{qpow, Real};
use crate::sector::{tensor_product, Interval, SectorVector};

use super::kink::{build_kink, KinkSpec};

/// ξ_{L,n}(x) = ψ^{+−}_{[1,x]}(⌊n/2⌋) ⊗ ψ^{−+}_{[x+1,L]}(⌈n/2⌉).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DropletSpec {
    pub l: usize,
    pub n: usize,
    pub x: usize,
}

impl DropletSpec {
    /// Requires ⌊n/2⌋ ≤ x ≤ L − ⌈n/2⌉.
    pub fn new(l: usize, n: usize, x: usize) -> Result<Self> {
        if n > l {
            return Err(Error::Range(format!("{n} down spins do not fit on {l} sites")));
        }
        let (lo, hi) = Self::window(l, n);
        if x < lo || x > hi {
            return Err(Error::Range(format!("droplet cut x = {x} outside [{lo},{hi}] for L = {l}, n = {n}")));
        }
        Ok(Self { l, n, x })
    }

    /// Admissible cut range [⌊n/2⌋, L − ⌈n/2⌉].
    pub fn window(l: usize, n: usize) -> (usize, usize) {
        (n / 2, l - n.div_ceil(2))
    }

    /// Every admissible droplet of the sector, in increasing x.
    pub fn all(l: usize, n: usize) -> Result<Vec<Self>> {
        if n > l {
            return Err(Error::Range(format!("{n} down spins do not fit on {l} sites")));
        }
        let (lo, hi) = Self::window(l, n);
        (lo..=hi).map(|x| Self::new(l, n, x)).collect()
    }

    pub fn left_count(&self) -> usize {
        self.n / 2
    }

    pub fn right_count(&self) -> usize {
        self.n - self.n / 2
    }
}

pub fn build_droplet<T: Real>(spec: &DropletSpec, q: T) -> Result<SectorVector<T>> {
    let x = spec.x as i64;
    let left = build_kink(&KinkSpec::kink(Interval::new(1, x)?, spec.left_count())?, q)?;
    let right = build_kink(&KinkSpec::antikink(Interval::new(x + 1, spec.l as i64)?, spec.right_count())?, q)?;
    tensor_product(&left, &right)
}

fn check_counts(x: i64, y: i64, r: i64, k: i64, m: i64, n: i64) -> Result<()> {
    if x < 0 || y < 0 || r < 0 || k < 0 || m < 0 || n < 0 || m > x || n > y {
        return Err(Error::Range(format!(
            "inadmissible pair-overlap counts (x,y,r,k,m,n) = ({x},{y},{r},{k},{m},{n})"
        )));
    }
    Ok(())
}

/// ⟨ψ^{+−}_{[1,x]}(m) ⊗ ψ^{−+}_{[x+1,x+y+r]}(n+k), ψ^{+−}_{[1,x+r]}(m+k) ⊗ ψ^{−+}_{[x+r+1,x+y+r]}(n)⟩
/// = C(r,k) [x m] [y n] q^{m(m+k+1) + n(n+k+1) + k(r+1) + (m+n)(r−k)}.
pub fn pair_overlap_closed<T: Real>(x: i64, y: i64, r: i64, k: i64, m: i64, n: i64, q: T) -> Result<T> {
    check_counts(x, y, r, k, m, n)?;
    if k > r {
        return Ok(T::zero());
    }
    let e = m * (m + k + 1) + n * (n + k + 1) + k * (r + 1) + (m + n) * (r - k);
    Ok(binom_f::<T>(r, k) * qbinom(x, m, q) * qbinom(y, n, q) * qpow(q, e))
}

/// The same overlap divided by both norms:
/// C(r,k) √([x m][y n] / [x+r m+k][y+r n+k]) q^{(m+n+k)(r−k)}.
pub fn pair_overlap_normalized_closed<T: Real>(x: i64, y: i64, r: i64, k: i64, m: i64, n: i64, q: T) -> Result<T> {
    check_counts(x, y, r, k, m, n)?;
    if k > r {
        return Ok(T::zero());
    }
    let ratio = qbinom(x, m, q) * qbinom(y, n, q) / (qbinom(x + r, m + k, q) * qbinom(y + r, n + k, q));
    Ok(binom_f::<T>(r, k) * ratio.sqrt() * qpow(q, (m + n + k) * (r - k)))
}

/// Direct evaluation of the pair overlap from built states; returns
/// (raw inner product, product of the norms).
pub fn pair_overlap_direct<T: Real>(x: i64, y: i64, r: i64, k: i64, m: i64, n: i64, q: T) -> Result<(T, T)> {
    check_counts(x, y, r, k, m, n)?;
    if k > r {
        return Ok((T::zero(), T::one()));
    }
    let total = x + y + r;
    let piece = |a: i64, b: i64, c: i64, kink: bool| -> Result<SectorVector<T>> {
        let iv = Interval::new(a, b)?;
        let spec = if kink { KinkSpec::kink(iv, c as usize)? } else { KinkSpec::antikink(iv, c as usize)? };
        build_kink(&spec, q)
    };
    let lhs = tensor_product(&piece(1, x, m, true)?, &piece(x + 1, total, n + k, false)?)?;
    let rhs = tensor_product(&piece(1, x + r, m + k, true)?, &piece(x + r + 1, total, n, false)?)?;
    Ok((lhs.dot(&rhs)?, lhs.norm() * rhs.norm()))
}

/// Normalised droplet overlap and its bounded prefactor C, defined by
/// overlap = C · q^{n|x−y|}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DropletOverlap<T> {
    pub normalized: T,
    pub c_factor: T,
}

pub fn droplet_overlap<T: Real>(a: &DropletSpec, b: &DropletSpec, q: T) -> Result<DropletOverlap<T>> {
    if a.l != b.l || a.n != b.n {
        return Err(Error::Mismatch(format!(
            "droplets of (L,n) = ({},{}) and ({},{})",
            a.l, a.n, b.l, b.n
        )));
    }
    let va = build_droplet(a, q)?;
    let vb = build_droplet(b, q)?;
    let normalized = va.dot(&vb)? / (va.norm() * vb.norm());
    let sep = (a.x as i64 - b.x as i64).abs();
    let c_factor = normalized / qpow(q, a.n as i64 * sep);
    Ok(DropletOverlap { normalized, c_factor })
}

/// Closed form of the normalised droplet overlap: with x ≤ y, r = y − x,
/// m = ⌊n/2⌋, p = ⌈n/2⌉ and s = L − y,
/// √([x m][s p] / [y m][s+r p]) q^{nr}.
pub fn droplet_overlap_closed<T: Real>(l: usize, n: usize, x: usize, y: usize, q: T) -> Result<T> {
    DropletSpec::new(l, n, x)?;
    DropletSpec::new(l, n, y)?;
    let (lo, hi) = (x.min(y) as i64, x.max(y) as i64);
    let r = hi - lo;
    let (m, p) = ((n / 2) as i64, (n - n / 2) as i64);
    let s = l as i64 - hi;
    pair_overlap_normalized_closed(lo, s, r, 0, m, p, q)
}

/// For (n₁, n₂) split at x: the distance between the projection onto the
/// split state ψ^{+−}_{[1,x]}(n₁) ⊗ ψ^{−+}_{[x+1,L]}(n₂) and onto the droplet
/// ξ_{L,n₁+n₂}(x + ⌊(n₂−n₁)/2⌋), with the bound 4q^{min(n₁,n₂)+1}/√(1−q²).
pub fn split_projection_distance<T: Real>(l: usize, x: usize, n1: usize, n2: usize, q: T) -> Result<(T, T)> {
    if n1 > x || n2 + x > l {
        return Err(Error::Range(format!("split ({n1},{n2}) at {x} does not fit on {l} sites")));
    }
    let xi = x as i64;
    let split = tensor_product(
        &build_kink(&KinkSpec::kink(Interval::new(1, xi)?, n1)?, q)?,
        &build_kink(&KinkSpec::antikink(Interval::new(xi + 1, l as i64)?, n2)?, q)?,
    )?;
    let shift = (n2 as i64 - n1 as i64).div_euclid(2);
    let target = DropletSpec::new(l, n1 + n2, (xi + shift) as usize)?;
    let d = build_droplet(&target, q)?;
    let ov = split.dot(&d)? / (split.norm() * d.norm());
    let dist = (T::one() - ov * ov).max(T::zero()).sqrt();
    let bound = T::lit(4.0) * qpow(q, n1.min(n2) as i64 + 1) / (T::one() - q * q).sqrt();
    Ok((dist, bound))
}

/// Residual data of a droplet under the droplet Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DropletResidual<T> {
    /// ‖(H⁺⁺ − A)ξ‖² / ‖ξ‖².
    pub residual_sq: T,
    /// 2q^{2⌊n/2⌋}/(1 − q^{2⌊n/2⌋}); `None` when ⌊n/2⌋ = 0.
    pub bound: Option<T>,
    /// ‖H⁺⁺ξ − H⁺⁺_{x,x+1}ξ‖ / ‖ξ‖; `None` when the cut sits at a chain end.
    pub locality_error: Option<T>,
}

pub fn droplet_residual<T: Real>(spec: &DropletSpec, params: &AnisotropyParams<T>) -> Result<DropletResidual<T>> {
    let xi = build_droplet(spec, params.q)?;
    let nrm = xi.norm();
    let h = Hamiltonian::chain(spec.l, Boundary::DROPLET, *params)?;
    let hxi = h.apply(&xi)?;
    let mut shifted = hxi.clone();
    shifted.axpy(-params.a_field, &xi)?;
    let residual_sq = shifted.norm_sq() / (nrm * nrm);
    let half = spec.n as i64 / 2;
    let bound = (half > 0).then(|| {
        let t = qpow(params.q, 2 * half);
        T::lit(2.0) * t / (T::one() - t)
    });
    let locality_error = if spec.x >= 1 && spec.x < spec.l {
        let x = spec.x as i64;
        let bond = Hamiltonian::new(Interval::new(x, x + 1)?, Boundary::DROPLET, *params)?;
        Some(hxi.sub(&bond.apply(&xi)?)?.norm() / nrm)
    } else {
        None
    };
    Ok(DropletResidual { residual_sq, bound, locality_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sector::SpinConfiguration;

    #[test]
    fn all_down_droplet() {
        let d = build_droplet(&DropletSpec::new(5, 5, 2).unwrap(), 0.25f64).unwrap();
        assert_eq!(d.dim(), 1);
        let p = AnisotropyParams::from_q(0.25f64).unwrap();
        let r = droplet_residual(&DropletSpec::new(5, 5, 2).unwrap(), &p).unwrap();
        assert_eq!(r.residual_sq, 0.0);
    }

    #[test]
    fn centre_amplitude() {
        let q = 0.25f64;
        let d = build_droplet(&DropletSpec::new(6, 2, 3).unwrap(), q).unwrap();
        let c = SpinConfiguration::from_down_sites(Interval::chain(6).unwrap(), &[3, 4]).unwrap();
        assert!((d.amplitude(&c) - q * q).abs() < 1e-16);
        assert!(DropletSpec::new(6, 2, 0).is_err());
        assert_eq!(DropletSpec::all(10, 4).unwrap().len(), 7);
    }

    #[test]
    fn pair_overlap_example() {
        let q = 0.5f64;
        let closed = pair_overlap_closed(2, 2, 1, 1, 1, 0, q).unwrap();
        let (direct, _) = pair_overlap_direct(2, 2, 1, 1, 1, 0, q).unwrap();
        assert!((closed - direct).abs() < 1e-15 * direct.abs().max(1.0));
        assert_eq!(pair_overlap_closed(2, 2, 1, 2, 1, 0, q).unwrap(), 0.0);
        let norms = super::super::kink::kink_norm_sq_closed(3, 1, q).unwrap()
            * super::super::kink::kink_norm_sq_closed(2, 2, q).unwrap();
        assert!((pair_overlap_closed(3, 2, 0, 0, 1, 2, q).unwrap() - norms).abs() < 1e-15);
    }

    #[test]
    fn droplet_overlap_matches_closed() {
        let q = 0.25f64;
        let a = DropletSpec::new(8, 2, 3).unwrap();
        let b = DropletSpec::new(8, 2, 4).unwrap();
        let ov = droplet_overlap(&a, &b, q).unwrap();
        let closed = droplet_overlap_closed(8, 2, 3, 4, q).unwrap();
        assert!((ov.normalized - closed).abs() < 1e-15);
        let finf = crate::qcore::fq_inf(q);
        assert!(ov.c_factor >= finf && ov.c_factor <= 1.0 / finf);
        let same = droplet_overlap(&a, &a, q).unwrap();
        assert!((same.normalized - 1.0).abs() < 1e-15);
        assert!(droplet_overlap(&a, &DropletSpec::new(9, 2, 3).unwrap(), q).is_err());
    }

    #[test]
    fn residual_bound_example() {
        let p = AnisotropyParams::from_q(0.25f64).unwrap();
        let r = droplet_residual(&DropletSpec::new(10, 4, 5).unwrap(), &p).unwrap();
        assert!(r.residual_sq <= r.bound.unwrap());
        assert!((r.bound.unwrap() - 2.0 * 0.25f64.powi(4) / (1.0 - 0.25f64.powi(4))).abs() < 1e-15);
        assert!(r.locality_error.unwrap() < 1e-14);
    }
}
