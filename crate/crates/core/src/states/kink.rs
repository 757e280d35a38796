use crate::error::{Error, Result};
use crate::qcore::{binom_f, qbinom};
use crate::scalar::{qpow, Real};
use crate::sector::{tensor_product, Interval, SectorBasis, SectorVector};

/// Which interface the state carries: up-to-down (kink, ground state of
/// H⁺⁻) or down-to-up (antikink, ground state of H⁻⁺).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KinkKind {
    Kink,
    Antikink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KinkSpec {
    pub interval: Interval,
    pub n_down: usize,
    pub kind: KinkKind,
}

impl KinkSpec {
    pub fn new(interval: Interval, n_down: usize, kind: KinkKind) -> Result<Self> {
        if n_down > interval.len() {
            return Err(Error::Range(format!(
                "{n_down} down spins do not fit on {interval}"
            )));
        }
        Ok(Self { interval, n_down, kind })
    }

    pub fn kink(interval: Interval, n_down: usize) -> Result<Self> {
        Self::new(interval, n_down, KinkKind::Kink)
    }

    pub fn antikink(interval: Interval, n_down: usize) -> Result<Self> {
        Self::new(interval, n_down, KinkKind::Antikink)
    }
}

/// Exponent of q in the coefficient of the configuration `mask` on
/// `interval`: Σ_k (b+1−x_k) for a kink, Σ_k (x_k+1−a) for an antikink.
pub fn kink_exponent(kind: KinkKind, interval: Interval, mask: u64) -> i64 {
    let len = interval.len() as i64;
    let mut e = 0i64;
    let mut m = mask;
    while m != 0 {
        let off = m.trailing_zeros() as i64;
        e += match kind {
            KinkKind::Kink => len - off,
            KinkKind::Antikink => off + 1,
        };
        m &= m - 1;
    }
    e
}

/// ψ^{+−}_{[a,b]}(n) or ψ^{−+}_{[a,b]}(n) with its raw coefficients.
pub fn build_kink<T: Real>(spec: &KinkSpec, q: T) -> Result<SectorVector<T>> {
    let basis = SectorBasis::shared(spec.interval, spec.n_down)?;
    Ok(SectorVector::from_fn(basis, |m| qpow(q, kink_exponent(spec.kind, spec.interval, m))))
}

/// ‖ψ‖² = [len n]_{q²} q^{n(n+1)} for either kind.
pub fn kink_norm_sq_closed<T: Real>(length: usize, n: usize, q: T) -> Result<T> {
    if n > length {
        return Err(Error::Range(format!("{n} down spins do not fit on {length} sites")));
    }
    let n = n as i64;
    Ok(qbinom(length as i64, n, q) * qpow(q, n * (n + 1)))
}

/// ⟨ψ^{+−}(m), ψ^{−+}(n)⟩ = δ_{mn} C(len, n) q^{n(len+1)}: every down spin
/// contributes q^{len+1} to the product of the two amplitudes.
pub fn mixed_overlap_closed<T: Real>(length: usize, m: usize, n: usize, q: T) -> Result<T> {
    if m > length || n > length {
        return Err(Error::Range(format!("down-spin counts {m}, {n} exceed {length} sites")));
    }
    if m != n {
        return Ok(T::zero());
    }
    Ok(binom_f::<T>(length as i64, n as i64) * qpow(q, n as i64 * (length as i64 + 1)))
}

/// Rebuilds the state from its split at `cut` (left part [a,cut], right
/// part [cut+1,b]) as Σ_k left(k) ⊗ right(n−k) q^{w(k)} with w(k) = (b−cut)k
/// for a kink and (cut+1−a)(n−k) for an antikink. Returns the largest
/// amplitude discrepancy against [`build_kink`].
pub fn coproduct_check<T: Real>(spec: &KinkSpec, cut: i64, q: T) -> Result<T> {
    let Interval { a, b } = spec.interval;
    if cut < a || cut >= b {
        return Err(Error::Range(format!("cut {cut} must satisfy {a} <= cut < {b}")));
    }
    let direct = build_kink(spec, q)?;
    let left_iv = Interval::new(a, cut)?;
    let right_iv = Interval::new(cut + 1, b)?;
    let n = spec.n_down as i64;
    let mut sum = SectorVector::zeros(direct.basis.clone());
    for k in 0..=n {
        let (kl, kr) = (k as usize, (n - k) as usize);
        if kl > left_iv.len() || kr > right_iv.len() {
            continue;
        }
        let left = build_kink(&KinkSpec::new(left_iv, kl, spec.kind)?, q)?;
        let right = build_kink(&KinkSpec::new(right_iv, kr, spec.kind)?, q)?;
        let w = match spec.kind {
            KinkKind::Kink => (b - cut) * k,
            KinkKind::Antikink => (cut + 1 - a) * (n - k),
        };
        sum.axpy(qpow(q, w), &tensor_product(&left, &right)?)?;
    }
    sum.max_abs_diff(&direct)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sector::SpinConfiguration;

    fn iv(a: i64, b: i64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn two_site_amplitudes() {
        let q = 0.3f64;
        let k = build_kink(&KinkSpec::kink(iv(1, 2), 1).unwrap(), q).unwrap();
        let down_up = SpinConfiguration::from_down_sites(iv(1, 2), &[1]).unwrap();
        let up_down = SpinConfiguration::from_down_sites(iv(1, 2), &[2]).unwrap();
        assert!((k.amplitude(&down_up) - q * q).abs() < 1e-16);
        assert!((k.amplitude(&up_down) - q).abs() < 1e-16);
        let ak = build_kink(&KinkSpec::antikink(iv(1, 2), 1).unwrap(), q).unwrap();
        assert!((ak.amplitude(&down_up) - q).abs() < 1e-16);
        assert!((ak.amplitude(&up_down) - q * q).abs() < 1e-16);
        let empty = build_kink(&KinkSpec::kink(iv(1, 4), 0).unwrap(), q).unwrap();
        assert_eq!(empty.amplitudes, vec![1.0]);
    }

    #[test]
    fn closed_norms() {
        assert!((kink_norm_sq_closed(2, 1, 0.25f64).unwrap() - 0.066_406_25).abs() < 1e-16);
        assert_eq!(kink_norm_sq_closed(5, 0, 0.25f64).unwrap(), 1.0);
        assert!((mixed_overlap_closed(2, 1, 1, 0.25f64).unwrap() - 0.031_25).abs() < 1e-16);
        assert_eq!(mixed_overlap_closed(3, 1, 2, 0.25f64).unwrap(), 0.0);
        assert!(kink_norm_sq_closed(2, 3, 0.25f64).is_err());
        assert!(KinkSpec::kink(iv(1, 2), 3).is_err());
    }

    #[test]
    fn coproduct_examples() {
        let q = 0.25f64;
        assert!(coproduct_check(&KinkSpec::kink(iv(1, 4), 2).unwrap(), 2, q).unwrap() <= 1e-13);
        assert_eq!(coproduct_check(&KinkSpec::kink(iv(1, 4), 0).unwrap(), 2, q).unwrap(), 0.0);
        assert!(coproduct_check(&KinkSpec::antikink(iv(1, 5), 3).unwrap(), 3, q).unwrap() <= 1e-13);
        assert!(coproduct_check(&KinkSpec::kink(iv(1, 4), 2).unwrap(), 4, q).is_err());
    }
}
