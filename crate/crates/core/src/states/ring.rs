use crate::error::{Error, Result};
use crate::operators::translate_by;
use crate::qcore::{binom_f, qbinom};
use crate::scalar::{qpow, Real};
use crate::sector::SectorVector;

use super::droplet::{build_droplet, DropletSpec};

/// T^x applied to the centred droplet ξ_{L,n}(⌊L/2⌋) on the ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RingDropletSpec {
    pub l: usize,
    pub n: usize,
    pub x: usize,
}

impl RingDropletSpec {
    pub fn new(l: usize, n: usize, x: usize) -> Result<Self> {
        if n > l {
            return Err(Error::Range(format!("{n} down spins do not fit on {l} sites")));
        }
        if x >= l {
            return Err(Error::Range(format!("ring shift {x} must be below L = {l}")));
        }
        Ok(Self { l, n, x })
    }
}

pub fn ring_droplet<T: Real>(spec: &RingDropletSpec, q: T) -> Result<SectorVector<T>> {
    let base = build_droplet(&DropletSpec::new(spec.l, spec.n, spec.l / 2)?, q)?;
    translate_by(&base, spec.x as i64)
}

/// ⟨ξ(0), T^x ξ(0)⟩/‖ξ(0)‖² for 0 ≤ x ≤ ⌊L/2⌋:
/// q^{nx} Σ_k [F−x m−k][C−x p−k] / ([F m][C p]) · C(x,k)² · q^{k(L+2k−2x−2n)}
/// with F = ⌊L/2⌋, C = L − F, m = ⌊n/2⌋, p = ⌈n/2⌉.
pub fn ring_translation_overlap_closed<T: Real>(l: usize, n: usize, x: usize, q: T) -> Result<T> {
    if n > l {
        return Err(Error::Range(format!("{n} down spins do not fit on {l} sites")));
    }
    if x > l / 2 {
        return Err(Error::Range(format!("shift {x} exceeds floor(L/2) = {}", l / 2)));
    }
    let (li, ni, xi) = (l as i64, n as i64, x as i64);
    let (f, c) = (li / 2, li - li / 2);
    let (m, p) = (ni / 2, ni - ni / 2);
    let den = qbinom(f, m, q) * qbinom(c, p, q);
    let mut sum = T::zero();
    for k in 0..=xi.min(m).min(p) {
        let num = qbinom(f - xi, m - k, q) * qbinom(c - xi, p - k, q);
        if num == T::zero() {
            continue;
        }
        let b = binom_f::<T>(xi, k);
        sum = sum + num / den * b * b * qpow(q, k * (li + 2 * k - 2 * xi - 2 * ni));
    }
    Ok(qpow(q, ni * xi) * sum)
}

/// The same overlap from the built and translated states.
pub fn ring_translation_overlap_direct<T: Real>(l: usize, n: usize, x: usize, q: T) -> Result<T> {
    let base = ring_droplet(&RingDropletSpec::new(l, n, 0)?, q)?;
    let moved = translate_by(&base, x as i64)?;
    Ok(base.dot(&moved)? / base.norm_sq())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_shift_is_one() {
        assert!((ring_translation_overlap_closed(10, 4, 0, 0.25f64).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn small_ring_matches_direct() {
        let q = 0.25f64;
        for (l, n, x) in [(8, 3, 1), (8, 4, 2), (7, 2, 3), (10, 5, 5)] {
            let c = ring_translation_overlap_closed(l, n, x, q).unwrap();
            let d = ring_translation_overlap_direct(l, n, x, q).unwrap();
            assert!((c - d).abs() <= 1e-12 * d.abs().max(1e-300), "{l} {n} {x}: {c} vs {d}");
        }
        assert!(ring_translation_overlap_closed(8, 3, 5, q).is_err());
    }
}
