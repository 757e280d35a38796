use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sector::{Interval, SectorVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

/// One part of a partition together with its required down-spin count.
/// Counts outside [0, len] are allowed and make the projector vanish.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub interval: Interval,
    pub count: i64,
}

impl Block {
    pub fn new(interval: Interval, count: i64) -> Self {
        Self { interval, count }
    }
}

/// Q_{P,n⃗}: keeps configurations with exactly `count` down spins in every
/// block; sites outside the blocks are unconstrained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralizedSectorProjector {
    blocks: Vec<Block>,
}

impl GeneralizedSectorProjector {
    /// Blocks must be listed left to right with no gaps or overlaps.
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::MalformedPartition("no blocks".into()));
        }
        for w in blocks.windows(2) {
            if w[1].interval.a != w[0].interval.b + 1 {
                return Err(Error::MalformedPartition(format!(
                    "blocks {} and {} are not adjacent",
                    w[0].interval, w[1].interval
                )));
            }
        }
        Ok(Self { blocks })
    }

    /// Q_{Λ,n}.
    pub fn single(interval: Interval, count: i64) -> Self {
        Self { blocks: vec![Block::new(interval, count)] }
    }

    /// Partition of [x₀+1, x_r] at the cut points x₀ < x₁ < … < x_r.
    pub fn from_cuts(cuts: &[i64], counts: &[i64]) -> Result<Self> {
        if cuts.len() != counts.len() + 1 {
            return Err(Error::MalformedPartition(format!(
                "{} cut points need {} counts, got {}",
                cuts.len(),
                cuts.len().saturating_sub(1),
                counts.len()
            )));
        }
        let mut blocks = Vec::with_capacity(counts.len());
        for (w, &c) in cuts.windows(2).zip(counts) {
            if w[1] < w[0] {
                return Err(Error::MalformedPartition(format!("cut points {cuts:?} decrease")));
            }
            blocks.push(Block::new(Interval::new(w[0] + 1, w[1])?, c));
        }
        Self::new(blocks)
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// The union of all blocks.
    pub fn support(&self) -> Interval {
        Interval { a: self.blocks[0].interval.a, b: self.blocks[self.blocks.len() - 1].interval.b }
    }

    fn accepts(&self, mask: u64, ambient: &Interval) -> bool {
        self.blocks
            .iter()
            .all(|bl| (mask & ambient.mask_of(&bl.interval)).count_ones() as i64 == bl.count)
    }
}

/// A diagonal projector in the configuration basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Projector {
    Q(GeneralizedSectorProjector),
    /// P_J (spin `None`), P^↑_J or P^↓_J: J fully polarised.
    Polarized { interval: Interval, spin: Option<Spin> },
    /// 1 − P for an inner projector P.
    Complement(Box<Projector>),
}

impl Projector {
    pub fn p_j(interval: Interval) -> Self {
        Projector::Polarized { interval, spin: None }
    }

    pub fn p_up(interval: Interval) -> Self {
        Projector::Polarized { interval, spin: Some(Spin::Up) }
    }

    pub fn p_down(interval: Interval) -> Self {
        Projector::Polarized { interval, spin: Some(Spin::Down) }
    }

    /// G^σ_j on [1,L] for J = [a,b]: j down spins left of J, J polarised
    /// along σ, the rest of the n down spins right of J.
    pub fn g(l: usize, n: usize, j_interval: Interval, sigma: Spin, j: i64) -> Result<Self> {
        let Interval { a, b } = j_interval;
        if j_interval.is_empty() || a < 1 || b > l as i64 {
            return Err(Error::MalformedPartition(format!("J = {j_interval} must be a nonempty subinterval of [1,{l}]")));
        }
        let inner = match sigma {
            Spin::Up => 0,
            Spin::Down => j_interval.len() as i64,
        };
        let q = GeneralizedSectorProjector::from_cuts(&[0, a - 1, b, l as i64], &[j, inner, n as i64 - j - inner])?;
        Ok(Projector::Q(q))
    }

    pub fn complement(self) -> Self {
        Projector::Complement(Box::new(self))
    }

    pub fn support(&self) -> Interval {
        match self {
            Projector::Q(q) => q.support(),
            Projector::Polarized { interval, .. } => *interval,
            Projector::Complement(p) => p.support(),
        }
    }

    /// Whether the configuration `mask` (relative to `ambient`) survives.
    pub fn accepts(&self, mask: u64, ambient: &Interval) -> bool {
        match self {
            Projector::Q(q) => q.accepts(mask, ambient),
            Projector::Polarized { interval, spin } => {
                let m = ambient.mask_of(interval);
                let bits = mask & m;
                match spin {
                    None => bits == 0 || bits == m,
                    Some(Spin::Up) => bits == 0,
                    Some(Spin::Down) => bits == m,
                }
            }
            Projector::Complement(p) => !p.accepts(mask, ambient),
        }
    }

    pub fn apply<T: Real>(&self, v: &SectorVector<T>) -> Result<SectorVector<T>> {
        apply_projector(self, v)
    }
}

/// Zeroes every amplitude whose configuration the projector rejects.
pub fn apply_projector<T: Real>(p: &Projector, v: &SectorVector<T>) -> Result<SectorVector<T>> {
    let ambient = v.interval();
    let support = p.support();
    if !ambient.contains_interval(&support) {
        return Err(Error::Mismatch(format!("projector on {support} applied to a vector on {ambient}")));
    }
    let mut out = v.clone();
    for (amp, &mask) in out.amplitudes.iter_mut().zip(v.basis.masks()) {
        if !p.accepts(mask, &ambient) {
            *amp = T::zero();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sector::SectorBasis;

    fn iv(a: i64, b: i64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn full_block_is_identity() {
        let b = SectorBasis::chain(6, 3).unwrap();
        let v = SectorVector::from_fn(b, |m| m as f64);
        let q = Projector::Q(GeneralizedSectorProjector::single(iv(1, 6), 3));
        assert_eq!(q.apply(&v).unwrap(), v);
    }

    #[test]
    fn polarised_projector_kills_mixed_states() {
        let b = SectorBasis::chain(4, 1).unwrap();
        let idx = b.rank_mask(0b0010);
        let e = SectorVector::<f64>::basis_state(b.clone(), idx);
        assert_eq!(Projector::p_j(iv(2, 3)).apply(&e).unwrap().norm(), 0.0);
        assert_eq!(Projector::p_j(iv(3, 4)).apply(&e).unwrap().norm(), 1.0);
        assert_eq!(Projector::p_down(iv(2, 2)).apply(&e).unwrap().norm(), 1.0);
        assert_eq!(Projector::p_up(iv(2, 2)).apply(&e).unwrap().norm(), 0.0);
        assert_eq!(Projector::p_up(iv(2, 2)).complement().apply(&e).unwrap().norm(), 1.0);
    }

    #[test]
    fn malformed_partitions() {
        let gap = GeneralizedSectorProjector::new(vec![Block::new(iv(1, 2), 0), Block::new(iv(4, 5), 0)]);
        assert!(matches!(gap, Err(Error::MalformedPartition(_))));
        let overlap = GeneralizedSectorProjector::new(vec![Block::new(iv(1, 3), 0), Block::new(iv(3, 5), 0)]);
        assert!(matches!(overlap, Err(Error::MalformedPartition(_))));
        assert!(GeneralizedSectorProjector::from_cuts(&[0, 3, 2], &[0, 0]).is_err());
    }

    #[test]
    fn g_projectors_resolve_p_j() {
        // Σ_j G↑_j + Σ_j G↓_j = P_J on the whole sector.
        let (l, n) = (7usize, 3usize);
        let j = iv(3, 4);
        let b = SectorBasis::chain(l, n).unwrap();
        let v = SectorVector::from_fn(b, |m| 1.0 + m as f64);
        let mut sum = SectorVector::zeros(v.basis.clone());
        for jj in 0..=n as i64 {
            for s in [Spin::Up, Spin::Down] {
                sum.axpy(1.0, &Projector::g(l, n, j, s, jj).unwrap().apply(&v).unwrap()).unwrap();
            }
        }
        assert_eq!(sum, Projector::p_j(j).apply(&v).unwrap());
    }

    #[test]
    fn support_outside_vector() {
        let b = SectorBasis::chain(3, 1).unwrap();
        let v = SectorVector::<f64>::zeros(b);
        assert!(Projector::p_j(iv(3, 4)).apply(&v).is_err());
    }
}
