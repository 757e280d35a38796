//! q-combinatorics: the anisotropy constants, Gaussian binomials at t = q²
//! and the partition products f_q(n) = ∏_{k≤n}(1 − q^{2k}).

use crate::error::{Error, Result};
use crate::scalar::Real;

/// The coupled constants q, Δ, A(Δ), γ of a gapped ferromagnetic chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnisotropyParams<T> {
    pub q: T,
    pub delta: T,
    /// Boundary field strength A(Δ) = (1 − q²)/(2(1 + q²)).
    pub a_field: T,
    /// Infinite-chain gap 1 − Δ⁻¹.
    pub gamma: T,
}

impl<T: Real> AnisotropyParams<T> {
    /// Builds the constants from 0 < q < 1.
    pub fn from_q(q: T) -> Result<Self> {
        if !(q > T::zero() && q < T::one()) {
            return Err(Error::Domain(format!("q must lie in (0,1), got {q}")));
        }
        let one = T::one();
        let two = T::lit(2.0);
        let q2 = q * q;
        let delta = (q + one / q) / two;
        let a_field = (one - q2) / (two * (one + q2));
        // 1 − 1/Δ written without the subtraction of nearly equal numbers.
        let gamma = (one - q) * (one - q) / (one + q2);
        Ok(Self { q, delta, a_field, gamma })
    }

    /// Builds the constants from Δ > 1, on the branch q = Δ − √(Δ² − 1) < 1.
    pub fn from_delta(delta: T) -> Result<Self> {
        if !(delta > T::one()) || !delta.is_finite() {
            return Err(Error::Domain(format!("delta must exceed 1, got {delta}")));
        }
        // 1/(Δ + √(Δ²−1)) avoids cancellation for large Δ.
        let q = T::one() / (delta + (delta * delta - T::one()).sqrt());
        let mut p = Self::from_q(q)?;
        p.delta = delta;
        Ok(p)
    }

    /// Kink gap γ_L = 1 − Δ⁻¹cos(π/L).
    pub fn gamma_l(&self, l: usize) -> Result<T> {
        kink_gap(l, self.delta)
    }

    /// Lowest nonzero two-site energy ½(1 − Δ⁻¹).
    pub fn bond_gap(&self) -> T {
        (T::one() - self.delta.recip()) / T::lit(2.0)
    }

    /// Lossy copy in double precision.
    pub fn to_f64(&self) -> AnisotropyParams<f64> {
        AnisotropyParams {
            q: self.q.to_f64_lossy(),
            delta: self.delta.to_f64_lossy(),
            a_field: self.a_field.to_f64_lossy(),
            gamma: self.gamma.to_f64_lossy(),
        }
    }
}

/// 1 − Δ⁻¹cos(π/L), the gap of the kink Hamiltonian on L ≥ 2 sites.
pub fn kink_gap<T: Real>(l: usize, delta: T) -> Result<T> {
    if l < 2 {
        return Err(Error::Domain(format!("kink gap needs L >= 2, got {l}")));
    }
    if !(delta > T::one()) {
        return Err(Error::Domain(format!("delta must exceed 1, got {delta}")));
    }
    let c = (T::PI() / T::from_count(l)).cos();
    Ok(T::one() - c / delta)
}

/// Gaussian binomial [m k] at t = q², zero outside 0 ≤ k ≤ m.
///
/// Evaluated with the recurrence [m k] = [m−1 k−1] + t^k [m−1 k], which
/// only adds nonnegative terms.
pub fn qbinom<T: Real>(m: i64, k: i64, q: T) -> T {
    if m < 0 || k < 0 || k > m {
        return T::zero();
    }
    let k = k.min(m - k) as usize;
    let m = m as usize;
    if k == 0 {
        return T::one();
    }
    let t = q * q;
    let mut row = vec![T::zero(); k + 1];
    row[0] = T::one();
    for i in 1..=m {
        let top = i.min(k);
        for j in (1..=top).rev() {
            row[j] = row[j - 1] + t.powi(j as i32) * row[j];
        }
    }
    row[k]
}

/// Ordinary binomial coefficient as a float, zero outside 0 ≤ k ≤ n.
pub fn binom_f<T: Real>(n: i64, k: i64) -> T {
    if n < 0 || k < 0 || k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    let mut acc = T::one();
    for i in 0..k {
        acc = acc * T::from_i64(n - i).unwrap() / T::from_i64(i + 1).unwrap();
    }
    acc.round()
}

/// Exact binomial coefficient, `None` on u128 overflow.
pub fn binom_exact(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// Precomputed Gaussian binomials [m k]_{q²} for m ≤ max_m.
#[derive(Debug, Clone)]
pub struct QBinomialTable<T> {
    q: T,
    max_m: usize,
    rows: Vec<Vec<T>>,
}

impl<T: Real> QBinomialTable<T> {
    pub fn new(q: T, max_m: usize) -> Self {
        let t = q * q;
        let mut rows: Vec<Vec<T>> = Vec::with_capacity(max_m + 1);
        rows.push(vec![T::one()]);
        for m in 1..=max_m {
            let prev = &rows[m - 1];
            let mut row = vec![T::one(); m + 1];
            for k in 1..m {
                row[k] = prev[k - 1] + t.powi(k as i32) * prev[k];
            }
            rows.push(row);
        }
        Self { q, max_m, rows }
    }

    pub fn q(&self) -> T {
        self.q
    }

    pub fn max_m(&self) -> usize {
        self.max_m
    }

    /// [m k]; zero outside 0 ≤ k ≤ m. Falls back to direct evaluation past
    /// the table.
    pub fn get(&self, m: i64, k: i64) -> T {
        if m < 0 || k < 0 || k > m {
            return T::zero();
        }
        match self.rows.get(m as usize) {
            Some(row) => row[k as usize],
            None => qbinom(m, k, self.q),
        }
    }
}

/// f_q(n) = ∏_{k=1..n}(1 − q^{2k}).
pub fn fq<T: Real>(n: usize, q: T) -> T {
    let t = q * q;
    let mut acc = T::one();
    let mut tk = T::one();
    for _ in 0..n {
        tk = tk * t;
        acc = acc * (T::one() - tk);
    }
    acc
}

/// f_q(∞), multiplying until a factor is within 1e−17 of 1.
pub fn fq_inf<T: Real>(q: T) -> T {
    let t = q * q;
    let cutoff = T::lit(1e-17);
    let mut acc = T::one();
    let mut tk = t;
    while tk >= cutoff {
        acc = acc * (T::one() - tk);
        tk = tk * t;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_constants() {
        let p = AnisotropyParams::from_q(0.25f64).unwrap();
        assert!((p.delta - 2.125).abs() < 1e-15);
        assert!((p.a_field - 15.0 / 34.0).abs() < 1e-15);
        assert!((p.gamma - 9.0 / 17.0).abs() < 1e-15);
        let h = AnisotropyParams::from_q(0.5f64).unwrap();
        assert!((h.delta - 1.25).abs() < 1e-15);
        assert!((h.a_field - 0.3).abs() < 1e-15);
        assert!((h.gamma - 0.2).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        assert!(AnisotropyParams::from_q(1.0f64).is_err());
        assert!(AnisotropyParams::from_q(0.0f64).is_err());
        assert!(AnisotropyParams::from_q(f64::NAN).is_err());
        assert!(AnisotropyParams::from_delta(1.0f64).is_err());
        assert!(kink_gap(1, 2.0f64).is_err());
    }

    #[test]
    fn delta_inverts_exact_surds() {
        assert_eq!(AnisotropyParams::from_delta(2.125f64).unwrap().q, 0.25);
        assert_eq!(AnisotropyParams::from_delta(1.25f64).unwrap().q, 0.5);
    }

    #[test]
    fn qbinom_small_values() {
        assert_eq!(qbinom(4, 0, 0.3f64), 1.0);
        assert!((qbinom(2, 1, 0.25f64) - 1.0625).abs() < 1e-15);
        assert!((qbinom(4, 2, 0.25f64) - 1.070_571_899_414_062_5).abs() < 1e-15);
        assert_eq!(qbinom(3, 4, 0.5f64), 0.0);
        assert_eq!(qbinom(3, -1, 0.5f64), 0.0);
    }

    #[test]
    fn table_matches_direct() {
        let tab = QBinomialTable::new(0.4f64, 20);
        for m in 0..=22 {
            for k in -1..=m + 1 {
                assert!((tab.get(m, k) - qbinom(m, k, 0.4)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn partition_products() {
        assert_eq!(fq(0, 0.25f64), 1.0);
        assert_eq!(fq(1, 0.25f64), 0.9375);
        assert!((fq_inf(0.25f64) - 0.933_594_707_399_603_2).abs() < 1e-15);
        assert_eq!(fq_inf(0.0f64), 1.0);
    }

    #[test]
    fn kink_gap_values() {
        assert!((kink_gap(2, 2.125f64).unwrap() - 1.0).abs() < 1e-15);
        assert!((kink_gap(3, 2.125f64).unwrap() - 13.0 / 17.0).abs() < 1e-15);
        assert!((kink_gap(12, 2.125f64).unwrap() - 0.545_446_6).abs() < 1e-7);
    }

    #[test]
    fn works_in_single_precision() {
        let p = AnisotropyParams::from_q(0.25f32).unwrap();
        assert!((p.delta - 2.125).abs() < 1e-6);
        assert!((qbinom(4, 2, 0.25f32) - 1.070_571_9).abs() < 1e-6);
    }
}
