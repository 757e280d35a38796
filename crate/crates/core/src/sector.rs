//! Fixed-magnetisation bases on integer intervals.
//!
//! A configuration on the interval [a,b] is a bitmask whose bit i is set when
//! site a+i carries a down spin. A sector basis lists every mask with n set
//! bits, ordered lexicographically by the sorted tuple of down positions
//! (x₁ < … < xₙ), so that `{1,2}` precedes `{1,3}` precedes `{2,3}`.

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::qcore::binom_exact;
use crate::scalar::Real;

/// Longest supported interval: one machine word of sites.
pub const MAX_SITES: usize = 63;

/// A closed interval of sites [a,b]. Empty intervals are written with
/// b = a − 1 and only arise as the outer pieces of a split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    pub a: i64,
    pub b: i64,
}

impl Interval {
    /// [a,b] with a ≤ b + 1 (length ≥ 0) and at most [`MAX_SITES`] sites.
    pub fn new(a: i64, b: i64) -> Result<Self> {
        if b < a - 1 {
            return Err(Error::Range(format!("interval [{a},{b}] has negative length")));
        }
        if (b - a + 1) as usize > MAX_SITES {
            return Err(Error::Range(format!(
                "interval [{a},{b}] exceeds {MAX_SITES} sites"
            )));
        }
        Ok(Self { a, b })
    }

    /// The chain [1,L].
    pub fn chain(l: usize) -> Result<Self> {
        Self::new(1, l as i64)
    }

    pub fn len(&self) -> usize {
        (self.b - self.a + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.b < self.a
    }

    pub fn contains(&self, site: i64) -> bool {
        self.a <= site && site <= self.b
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        other.is_empty() || (self.a <= other.a && other.b <= self.b)
    }

    /// Bit offset of `site` relative to this interval.
    #[inline]
    pub fn offset(&self, site: i64) -> u32 {
        debug_assert!(self.contains(site));
        (site - self.a) as u32
    }

    /// Mask with every site of `inner` set, relative to `self`.
    pub fn mask_of(&self, inner: &Interval) -> u64 {
        if inner.is_empty() {
            return 0;
        }
        debug_assert!(self.contains_interval(inner));
        low_bits(inner.len()) << self.offset(inner.a)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.a, self.b)
    }
}

#[inline]
pub(crate) fn low_bits(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// Spins on an interval; a set bit marks a down spin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinConfiguration {
    pub interval: Interval,
    pub down: u64,
}

impl SpinConfiguration {
    pub fn new(interval: Interval, down: u64) -> Result<Self> {
        if down & !low_bits(interval.len()) != 0 {
            return Err(Error::Range(format!(
                "mask {down:#b} has bits beyond the interval {interval}"
            )));
        }
        Ok(Self { interval, down })
    }

    /// Configuration with down spins at the listed sites.
    pub fn from_down_sites(interval: Interval, sites: &[i64]) -> Result<Self> {
        let mut down = 0u64;
        for &s in sites {
            if !interval.contains(s) {
                return Err(Error::Range(format!("site {s} outside {interval}")));
            }
            down |= 1 << interval.offset(s);
        }
        Ok(Self { interval, down })
    }

    pub fn n_down(&self) -> usize {
        self.down.count_ones() as usize
    }

    pub fn is_down(&self, site: i64) -> bool {
        self.interval.contains(site) && (self.down >> self.interval.offset(site)) & 1 == 1
    }

    /// Sorted down-spin sites.
    pub fn down_sites(&self) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.n_down());
        let mut m = self.down;
        while m != 0 {
            out.push(self.interval.a + m.trailing_zeros() as i64);
            m &= m - 1;
        }
        out
    }
}

impl fmt::Display for SpinConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.interval.len() {
            f.write_str(if (self.down >> i) & 1 == 1 { "↓" } else { "↑" })?;
        }
        Ok(())
    }
}

/// Exact C(length, n), erroring when n > length or on u64 overflow.
pub fn sector_dimension(length: usize, n: usize) -> Result<u64> {
    if n > length {
        return Err(Error::Range(format!("{n} down spins do not fit on {length} sites")));
    }
    binom_exact(length as u64, n as u64)
        .and_then(|v| u64::try_from(v).ok())
        .ok_or_else(|| Error::Overflow(format!("C({length},{n})")))
}

/// Concatenates configurations on [a,c] and [c+1,b].
pub fn compose_split(left: &SpinConfiguration, right: &SpinConfiguration) -> Result<SpinConfiguration> {
    if right.interval.a != left.interval.b + 1 {
        return Err(Error::NotAdjacent { left: left.interval, right: right.interval });
    }
    let joined = Interval::new(left.interval.a, right.interval.b)?;
    Ok(SpinConfiguration {
        interval: joined,
        down: left.down | (right.down << left.interval.len()),
    })
}

fn pascal() -> &'static [[u64; 65]; 65] {
    static TABLE: OnceLock<Box<[[u64; 65]; 65]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Box::new([[0u64; 65]; 65]);
        for n in 0..65 {
            t[n][0] = 1;
            for k in 1..=n {
                t[n][k] = t[n - 1][k - 1].saturating_add(t[n - 1][k]);
            }
        }
        t
    })
}

/// The basis of configurations on an interval with a fixed down-spin count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorBasis {
    interval: Interval,
    n_down: usize,
    states: Vec<u64>,
}

impl SectorBasis {
    pub fn new(interval: Interval, n_down: usize) -> Result<Self> {
        let len = interval.len();
        let dim = sector_dimension(len, n_down)?;
        let dim = usize::try_from(dim).map_err(|_| Error::Overflow(format!("C({len},{n_down})")))?;
        let mut states = Vec::new();
        states
            .try_reserve_exact(dim)
            .map_err(|_| Error::Overflow(format!("basis of dimension {dim}")))?;
        enumerate_lex(len, n_down, &mut states);
        debug_assert_eq!(states.len(), dim);
        Ok(Self { interval, n_down, states })
    }

    /// Reference-counted constructor, the usual way vectors share a basis.
    pub fn shared(interval: Interval, n_down: usize) -> Result<Arc<Self>> {
        Self::new(interval, n_down).map(Arc::new)
    }

    /// Sector `n_down` of the chain [1,L].
    pub fn chain(l: usize, n_down: usize) -> Result<Arc<Self>> {
        Self::shared(Interval::chain(l)?, n_down)
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn n_down(&self) -> usize {
        self.n_down
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn len(&self) -> usize {
        self.interval.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// All masks in basis order.
    pub fn masks(&self) -> &[u64] {
        &self.states
    }

    #[inline]
    pub fn mask(&self, index: usize) -> u64 {
        self.states[index]
    }

    /// Index of a mask known to have the right popcount and width.
    #[inline]
    pub fn rank_mask(&self, mask: u64) -> usize {
        let len = self.interval.len();
        if len == 0 {
            return 0;
        }
        let rev = mask.reverse_bits() >> (64 - len);
        let table = pascal();
        let mut colex = 0u64;
        let mut m = rev;
        let mut i = 1usize;
        while m != 0 {
            colex += table[m.trailing_zeros() as usize][i];
            i += 1;
            m &= m - 1;
        }
        self.states.len() - 1 - colex as usize
    }

    pub fn rank(&self, config: &SpinConfiguration) -> Result<usize> {
        if config.interval != self.interval {
            return Err(Error::Mismatch(format!(
                "configuration on {} ranked in a basis on {}",
                config.interval, self.interval
            )));
        }
        if config.n_down() != self.n_down {
            return Err(Error::Mismatch(format!(
                "configuration has {} down spins, basis sector is {}",
                config.n_down(),
                self.n_down
            )));
        }
        Ok(self.rank_mask(config.down))
    }

    pub fn unrank(&self, index: usize) -> Result<SpinConfiguration> {
        self.states
            .get(index)
            .map(|&down| SpinConfiguration { interval: self.interval, down })
            .ok_or_else(|| Error::Range(format!("index {index} >= dimension {}", self.dim())))
    }

    /// Same interval and sector.
    pub fn same_as(&self, other: &SectorBasis) -> bool {
        self.interval == other.interval && self.n_down == other.n_down
    }
}

/// Pushes all n-subsets of {0..len} in lexicographic order of sorted tuples.
fn enumerate_lex(len: usize, n: usize, out: &mut Vec<u64>) {
    fn rec(start: usize, len: usize, left: usize, acc: u64, out: &mut Vec<u64>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for p in start..=len - left {
            rec(p + 1, len, left - 1, acc | (1 << p), out);
        }
    }
    rec(0, len, n, 0, out);
}

/// Real amplitudes over a shared sector basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorVector<T> {
    pub basis: Arc<SectorBasis>,
    pub amplitudes: Vec<T>,
}

impl<T: Real> SectorVector<T> {
    pub fn zeros(basis: Arc<SectorBasis>) -> Self {
        let amplitudes = vec![T::zero(); basis.dim()];
        Self { basis, amplitudes }
    }

    pub fn from_amplitudes(basis: Arc<SectorBasis>, amplitudes: Vec<T>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::Mismatch(format!(
                "{} amplitudes for a basis of dimension {}",
                amplitudes.len(),
                basis.dim()
            )));
        }
        Ok(Self { basis, amplitudes })
    }

    /// Amplitudes computed from each configuration mask.
    pub fn from_fn(basis: Arc<SectorBasis>, f: impl Fn(u64) -> T) -> Self {
        let amplitudes = basis.masks().iter().map(|&m| f(m)).collect();
        Self { basis, amplitudes }
    }

    /// The unit vector on one basis configuration.
    pub fn basis_state(basis: Arc<SectorBasis>, index: usize) -> Self {
        let mut v = Self::zeros(basis);
        v.amplitudes[index] = T::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn interval(&self) -> Interval {
        self.basis.interval()
    }

    pub fn n_down(&self) -> usize {
        self.basis.n_down()
    }

    /// Amplitude on a configuration, zero when it lies outside the sector.
    pub fn amplitude(&self, config: &SpinConfiguration) -> T {
        match self.basis.rank(config) {
            Ok(i) => self.amplitudes[i],
            Err(_) => T::zero(),
        }
    }

    pub fn check_same_basis(&self, other: &Self) -> Result<()> {
        if self.basis.same_as(&other.basis) {
            Ok(())
        } else {
            Err(Error::Mismatch(format!(
                "vectors live on {} sector {} and {} sector {}",
                self.interval(),
                self.n_down(),
                other.interval(),
                other.n_down()
            )))
        }
    }

    pub fn dot(&self, other: &Self) -> Result<T> {
        self.check_same_basis(other)?;
        Ok(dot(&self.amplitudes, &other.amplitudes))
    }

    pub fn norm_sq(&self) -> T {
        dot(&self.amplitudes, &self.amplitudes)
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == T::zero() || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(self.scaled(n.recip()))
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            basis: self.basis.clone(),
            amplitudes: self.amplitudes.iter().map(|&a| a * s).collect(),
        }
    }

    /// self += s·other.
    pub fn axpy(&mut self, s: T, other: &Self) -> Result<()> {
        self.check_same_basis(other)?;
        for (a, &b) in self.amplitudes.iter_mut().zip(&other.amplitudes) {
            *a = *a + s * b;
        }
        Ok(())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(-T::one(), other)?;
        Ok(out)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.check_same_basis(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs())))
    }
}

/// Sequential inner product (fixed summation order for reproducibility).
#[inline]
pub fn dot<T: Real>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
}

/// Amplitude-wise tensor product of vectors on adjacent intervals.
pub fn tensor_product<T: Real>(left: &SectorVector<T>, right: &SectorVector<T>) -> Result<SectorVector<T>> {
    let li = left.interval();
    let ri = right.interval();
    if ri.a != li.b + 1 {
        return Err(Error::NotAdjacent { left: li, right: ri });
    }
    let joined = Interval::new(li.a, ri.b)?;
    let basis = SectorBasis::shared(joined, left.n_down() + right.n_down())?;
    let mut out = SectorVector::zeros(basis.clone());
    let shift = li.len();
    for (i, &lm) in left.basis.masks().iter().enumerate() {
        let la = left.amplitudes[i];
        for (j, &rm) in right.basis.masks().iter().enumerate() {
            let idx = basis.rank_mask(lm | (rm << shift));
            out.amplitudes[idx] = la * right.amplitudes[j];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(a: i64, b: i64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn dimensions() {
        assert_eq!(sector_dimension(12, 6).unwrap(), 924);
        assert_eq!(sector_dimension(9, 0).unwrap(), 1);
        assert!(matches!(sector_dimension(4, 5), Err(Error::Range(_))));
        assert_eq!(sector_dimension(63, 31).unwrap(), 916_312_070_471_295_267);
    }

    #[test]
    fn rank_examples() {
        let b = SectorBasis::new(iv(1, 3), 1).unwrap();
        let c1 = SpinConfiguration::from_down_sites(iv(1, 3), &[1]).unwrap();
        let c3 = SpinConfiguration::from_down_sites(iv(1, 3), &[3]).unwrap();
        assert_eq!(b.rank(&c1).unwrap(), 0);
        assert_eq!(b.rank(&c3).unwrap(), 2);
        assert_eq!(b.unrank(0).unwrap(), c1);
        assert_eq!(b.unrank(2).unwrap(), c3);
        assert!(b.unrank(3).is_err());
        let two = SpinConfiguration::from_down_sites(iv(1, 3), &[1, 2]).unwrap();
        assert!(matches!(b.rank(&two), Err(Error::Mismatch(_))));
        let other = SpinConfiguration::from_down_sites(iv(2, 4), &[2]).unwrap();
        assert!(matches!(b.rank(&other), Err(Error::Mismatch(_))));
    }

    #[test]
    fn lexicographic_not_numeric() {
        let b = SectorBasis::new(iv(1, 4), 2).unwrap();
        let sites: Vec<Vec<i64>> = (0..b.dim()).map(|i| b.unrank(i).unwrap().down_sites()).collect();
        assert_eq!(
            sites,
            vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4], vec![3, 4]]
        );
    }

    #[test]
    fn compose() {
        let l = SpinConfiguration::from_down_sites(iv(1, 1), &[1]).unwrap();
        let r = SpinConfiguration::from_down_sites(iv(2, 3), &[]).unwrap();
        let j = compose_split(&l, &r).unwrap();
        assert_eq!(j.to_string(), "↓↑↑");
        assert_eq!(j.interval, iv(1, 3));
        let far = SpinConfiguration::from_down_sites(iv(4, 5), &[]).unwrap();
        let near = SpinConfiguration::from_down_sites(iv(1, 2), &[]).unwrap();
        assert!(matches!(compose_split(&near, &far), Err(Error::NotAdjacent { .. })));
    }

    #[test]
    fn empty_interval_basis() {
        let b = SectorBasis::new(iv(3, 2), 0).unwrap();
        assert_eq!(b.dim(), 1);
        assert_eq!(b.rank_mask(0), 0);
        assert!(SectorBasis::new(iv(3, 2), 1).is_err());
    }

    #[test]
    fn full_width_interval() {
        let b = SectorBasis::new(iv(1, 63), 1).unwrap();
        assert_eq!(b.dim(), 63);
        assert_eq!(b.rank_mask(1 << 62), 62);
        assert!(Interval::new(1, 64).is_err());
    }

    #[test]
    fn tensor_product_amplitudes() {
        let lb = SectorBasis::shared(iv(1, 2), 1).unwrap();
        let rb = SectorBasis::shared(iv(3, 3), 0).unwrap();
        let l = SectorVector::from_amplitudes(lb, vec![2.0, 3.0]).unwrap();
        let r = SectorVector::from_amplitudes(rb, vec![5.0]).unwrap();
        let t = tensor_product(&l, &r).unwrap();
        assert_eq!(t.interval(), iv(1, 3));
        assert_eq!(t.amplitudes, vec![10.0, 15.0, 0.0]);
    }
}
