use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::qcore::AnisotropyParams;
use crate::scalar::Real;
use crate::sector::{Interval, SectorBasis, SectorVector};

pub const DEFAULT_DENSE_CAP: usize = 20_000;

/// Dense dimension cap, overridable through `XXZ_DENSE_CAP`.
pub fn dense_cap() -> usize {
    std::env::var("XXZ_DENSE_CAP")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_DENSE_CAP)
}

/// Sign of a boundary field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Plus,
    Zero,
    Minus,
}

impl Field {
    pub fn sign(self) -> i32 {
        match self {
            Field::Plus => 1,
            Field::Zero => 0,
            Field::Minus => -1,
        }
    }

    fn symbol(self) -> char {
        match self {
            Field::Plus => '+',
            Field::Zero => '0',
            Field::Minus => '-',
        }
    }
}

/// Boundary condition: open chain with end fields −A(αS³_a + βS³_b), or a
/// ring without fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Open { left: Field, right: Field },
    Periodic,
}

impl Boundary {
    pub const KINK: Boundary = Boundary::Open { left: Field::Plus, right: Field::Minus };
    pub const ANTIKINK: Boundary = Boundary::Open { left: Field::Minus, right: Field::Plus };
    pub const DROPLET: Boundary = Boundary::Open { left: Field::Plus, right: Field::Plus };
    pub const FREE: Boundary = Boundary::Open { left: Field::Zero, right: Field::Zero };
    pub const RING: Boundary = Boundary::Periodic;
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Open { left, right } => write!(f, "{}{}", left.symbol(), right.symbol()),
            Boundary::Periodic => f.write_str("ring"),
        }
    }
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "ring" || s == "periodic" {
            return Ok(Boundary::Periodic);
        }
        let field = |c: char| match c {
            '+' => Some(Field::Plus),
            '-' => Some(Field::Minus),
            '0' => Some(Field::Zero),
            _ => None,
        };
        let cs: Vec<char> = s.chars().collect();
        match cs.as_slice() {
            [l, r] => match (field(*l), field(*r)) {
                (Some(left), Some(right)) => Ok(Boundary::Open { left, right }),
                _ => Err(Error::Domain(format!("unknown boundary '{s}'"))),
            },
            _ => Err(Error::Domain(format!(
                "unknown boundary '{s}' (expected one of +-, -+, ++, --, 00, ring)"
            ))),
        }
    }
}

/// H^{αβ} on an interval, or the ring Hamiltonian.
///
/// Each bond contributes ¼ − S³S³ − Δ⁻¹(S¹S¹ + S²S²): ½ on anti-aligned
/// pairs, −(2Δ)⁻¹ between ↑↓ and ↓↑, nothing on aligned pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hamiltonian<T> {
    pub interval: Interval,
    pub boundary: Boundary,
    pub params: AnisotropyParams<T>,
}

impl<T: Real> Hamiltonian<T> {
    pub fn new(interval: Interval, boundary: Boundary, params: AnisotropyParams<T>) -> Result<Self> {
        if interval.is_empty() {
            return Err(Error::Range(format!("Hamiltonian on empty interval {interval}")));
        }
        if boundary == Boundary::Periodic && interval.len() < 2 {
            return Err(Error::Range("a ring needs at least two sites".into()));
        }
        Ok(Self { interval, boundary, params })
    }

    /// The Hamiltonian on [1,L].
    pub fn chain(l: usize, boundary: Boundary, params: AnisotropyParams<T>) -> Result<Self> {
        Self::new(Interval::chain(l)?, boundary, params)
    }

    /// Nearest-neighbour bonds as (x, y) site pairs, the wrap bond last.
    pub fn bonds(&self) -> Vec<(i64, i64)> {
        let Interval { a, b } = self.interval;
        let mut out: Vec<(i64, i64)> = (a..b).map(|x| (x, x + 1)).collect();
        if self.boundary == Boundary::Periodic {
            out.push((b, a));
        }
        out
    }

    /// Binds the Hamiltonian to a basis whose interval contains it.
    pub fn on(&self, basis: Arc<SectorBasis>) -> Result<SectorHamiltonian<T>> {
        let bi = basis.interval();
        if !bi.contains_interval(&self.interval) {
            return Err(Error::Mismatch(format!(
                "Hamiltonian on {} cannot act on vectors over {bi}",
                self.interval
            )));
        }
        let bonds = self
            .bonds()
            .into_iter()
            .map(|(x, y)| (1u64 << bi.offset(x)) | (1u64 << bi.offset(y)))
            .collect();
        let half = T::lit(0.5);
        let (left, right) = match self.boundary {
            Boundary::Open { left, right } => (left.sign(), right.sign()),
            Boundary::Periodic => (0, 0),
        };
        Ok(SectorHamiltonian {
            basis,
            bonds,
            left_bit: 1u64 << bi.offset(self.interval.a),
            right_bit: 1u64 << bi.offset(self.interval.b),
            left_field: self.params.a_field * T::lit(left as f64) * half,
            right_field: self.params.a_field * T::lit(right as f64) * half,
            hop: -half / self.params.delta,
        })
    }

    /// w = Hv.
    pub fn apply(&self, v: &SectorVector<T>) -> Result<SectorVector<T>> {
        self.on(v.basis.clone())?.apply(v)
    }

    /// ⟨v,Hv⟩/⟨v,v⟩.
    pub fn rayleigh(&self, v: &SectorVector<T>) -> Result<T> {
        let nsq = v.norm_sq();
        if nsq == T::zero() {
            return Err(Error::ZeroVector);
        }
        let hv = self.apply(v)?;
        Ok(v.dot(&hv)? / nsq)
    }
}

/// A Hamiltonian bound to a sector basis, with bond masks precomputed.
#[derive(Debug, Clone)]
pub struct SectorHamiltonian<T> {
    basis: Arc<SectorBasis>,
    bonds: Vec<u64>,
    left_bit: u64,
    right_bit: u64,
    /// Aα/2: an up spin at the left end contributes −Aα/2, a down spin +Aα/2.
    left_field: T,
    right_field: T,
    hop: T,
}

impl<T: Real> SectorHamiltonian<T> {
    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    #[inline]
    fn diagonal(&self, s: u64) -> T {
        let half = T::lit(0.5);
        let mut d = T::zero();
        for &bm in &self.bonds {
            let pair = s & bm;
            if pair != 0 && pair != bm {
                d = d + half;
            }
        }
        d = d + if s & self.left_bit != 0 { self.left_field } else { -self.left_field };
        d + if s & self.right_bit != 0 { self.right_field } else { -self.right_field }
    }

    #[inline]
    fn row_value(&self, i: usize, x: &[T]) -> T {
        let s = self.basis.mask(i);
        let mut acc = self.diagonal(s) * x[i];
        for &bm in &self.bonds {
            let pair = s & bm;
            if pair != 0 && pair != bm {
                acc = acc + self.hop * x[self.basis.rank_mask(s ^ bm)];
            }
        }
        acc
    }

    /// y = Hx on raw amplitude slices. Each output slot is an independent
    /// fixed-order sum, so the result does not depend on the thread count.
    pub fn apply_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.dim());
        assert_eq!(y.len(), self.dim());
        if self.dim() >= 4096 {
            y.par_iter_mut().enumerate().for_each(|(i, yi)| *yi = self.row_value(i, x));
        } else {
            for (i, yi) in y.iter_mut().enumerate() {
                *yi = self.row_value(i, x);
            }
        }
    }

    pub fn apply(&self, v: &SectorVector<T>) -> Result<SectorVector<T>> {
        if !v.basis.same_as(&self.basis) {
            return Err(Error::Mismatch(format!(
                "vector on {} sector {} applied to operator on {} sector {}",
                v.interval(),
                v.n_down(),
                self.basis.interval(),
                self.basis.n_down()
            )));
        }
        let mut out = SectorVector::zeros(self.basis.clone());
        self.apply_into(&v.amplitudes, &mut out.amplitudes);
        Ok(out)
    }

    /// Dense matrix, subject to [`dense_cap`].
    pub fn to_dense(&self) -> Result<Matrix<T>> {
        let dim = self.dim();
        let cap = dense_cap();
        if dim > cap {
            return Err(Error::DenseCapExceeded { dim, cap });
        }
        let mut m = Matrix::zeros(dim, dim);
        for i in 0..dim {
            let s = self.basis.mask(i);
            m[(i, i)] = self.diagonal(s);
            for &bm in &self.bonds {
                let pair = s & bm;
                if pair != 0 && pair != bm {
                    let j = self.basis.rank_mask(s ^ bm);
                    m[(i, j)] = m[(i, j)] + self.hop;
                }
            }
        }
        Ok(m)
    }
}

/// Dense sector matrix of `h` on `basis`.
pub fn assemble_dense<T: Real>(h: &Hamiltonian<T>, basis: Arc<SectorBasis>) -> Result<Matrix<T>> {
    h.on(basis)?.to_dense()
}

/// Largest operator-norm discrepancy among the three ways of cutting the
/// droplet chain [1,L] at the bond (x, x+1):
/// H⁺⁺ = H⁺⁻_{[1,x]} + H⁺⁺_{x,x+1} + H⁻⁺_{[x+1,L]} = H⁺⁻_{[1,x]} + H⁺⁺_{[x,L]}
/// = H⁺⁺_{[1,x]} + H⁻⁺_{[x,L]}.
pub fn cut_identity_residual<T: Real>(l: usize, x: usize, params: AnisotropyParams<T>, n: usize) -> Result<T> {
    if x < 1 || x + 1 > l {
        return Err(Error::Range(format!("cut site {x} must satisfy 1 <= x <= L-1 = {}", l as i64 - 1)));
    }
    let basis = SectorBasis::chain(l, n)?;
    let (li, xi) = (l as i64, x as i64);
    let dense = |a: i64, b: i64, bc: Boundary| -> Result<Matrix<T>> {
        assemble_dense(&Hamiltonian::new(Interval::new(a, b)?, bc, params)?, basis.clone())
    };
    let add = |m1: Matrix<T>, m2: Matrix<T>| -> Result<Matrix<T>> { m1.sub(&m2.scale(-T::one())) };
    let full = dense(1, li, Boundary::DROPLET)?;
    let three = add(
        add(dense(1, xi, Boundary::KINK)?, dense(xi, xi + 1, Boundary::DROPLET)?)?,
        dense(xi + 1, li, Boundary::ANTIKINK)?,
    )?;
    let two_a = add(dense(1, xi, Boundary::KINK)?, dense(xi, li, Boundary::DROPLET)?)?;
    let two_b = add(dense(1, xi, Boundary::DROPLET)?, dense(xi, li, Boundary::ANTIKINK)?)?;
    let mut worst = T::zero();
    for other in [three, two_a, two_b] {
        worst = worst.max(full.sub(&other)?.symmetric_norm()?);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::symmetric_eigen;

    fn params() -> AnisotropyParams<f64> {
        AnisotropyParams::from_q(0.25).unwrap()
    }

    #[test]
    fn boundary_parsing() {
        for s in ["+-", "-+", "++", "--", "00", "ring", "+0"] {
            assert_eq!(s.parse::<Boundary>().unwrap().to_string(), s);
        }
        assert!("x+".parse::<Boundary>().is_err());
        assert!("+++".parse::<Boundary>().is_err());
    }

    #[test]
    fn two_site_free_table() {
        let p = params();
        let b = SectorBasis::chain(2, 1).unwrap();
        let h = Hamiltonian::chain(2, Boundary::FREE, p).unwrap();
        let v = SectorVector::from_amplitudes(b, vec![1.0, 1.0]).unwrap().normalized().unwrap();
        let hv = h.apply(&v).unwrap();
        let e = 0.5 * (1.0 - 1.0 / p.delta);
        for (x, y) in hv.amplitudes.iter().zip(&v.amplitudes) {
            assert!((x - e * y).abs() < 1e-15);
        }
    }

    #[test]
    fn all_up_energies() {
        let p = params();
        for l in 1..=6 {
            let b = SectorBasis::chain(l, 0).unwrap();
            let v = SectorVector::basis_state(b.clone(), 0);
            let free = Hamiltonian::chain(l, Boundary::FREE, p).unwrap().apply(&v).unwrap();
            assert_eq!(free.amplitudes, vec![0.0]);
            let drop = Hamiltonian::chain(l, Boundary::DROPLET, p).unwrap().apply(&v).unwrap();
            assert!((drop.amplitudes[0] + p.a_field).abs() < 1e-15);
        }
    }

    #[test]
    fn dense_matches_matvec_and_is_symmetric() {
        let p = params();
        let b = SectorBasis::chain(8, 3).unwrap();
        for bc in [Boundary::DROPLET, Boundary::KINK, Boundary::RING, Boundary::FREE] {
            let h = Hamiltonian::chain(8, bc, p).unwrap();
            let m = assemble_dense(&h, b.clone()).unwrap();
            assert_eq!(m.asymmetry(), 0.0);
            for i in [0, 7, 55] {
                let e = SectorVector::basis_state(b.clone(), i);
                let hv = h.apply(&e).unwrap();
                for r in 0..b.dim() {
                    assert!((hv.amplitudes[r] - m[(r, i)]).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn n1_droplet_two_sites() {
        let p = params();
        let m = assemble_dense(&Hamiltonian::chain(2, Boundary::DROPLET, p).unwrap(), SectorBasis::chain(2, 1).unwrap())
            .unwrap();
        let ev = symmetric_eigen(m, false).unwrap().values;
        assert!((ev[0] - 0.5 * (1.0 - 1.0 / p.delta)).abs() < 1e-15);
        assert!((ev[1] - 0.5 * (1.0 + 1.0 / p.delta)).abs() < 1e-15);
    }

    #[test]
    fn mismatch_errors() {
        let p = params();
        let h = Hamiltonian::chain(3, Boundary::FREE, p).unwrap();
        let wrong = SectorBasis::chain(2, 1).unwrap();
        assert!(matches!(h.on(wrong), Err(Error::Mismatch(_))));
        assert!(Hamiltonian::chain(1, Boundary::RING, p).is_err());
    }

    #[test]
    fn subinterval_acts_as_identity_elsewhere() {
        let p = params();
        let b = SectorBasis::chain(4, 2).unwrap();
        let h = Hamiltonian::new(Interval::new(2, 3).unwrap(), Boundary::FREE, p).unwrap();
        // ↓↑↑↓ has aligned spins on [2,3]: annihilated.
        let idx = b.rank_mask(0b1001);
        let v = SectorVector::basis_state(b, idx);
        assert!(h.apply(&v).unwrap().norm() == 0.0);
    }

    #[test]
    fn cutting_identities() {
        let p = params();
        assert!(cut_identity_residual(4, 2, p, 2).unwrap() < 1e-12);
        let h = AnisotropyParams::from_q(0.5).unwrap();
        assert!(cut_identity_residual(6, 3, h, 3).unwrap() < 1e-12);
        assert!(cut_identity_residual(5, 1, h, 2).unwrap() < 1e-12);
        assert!(matches!(cut_identity_residual(4, 0, p, 2), Err(Error::Range(_))));
    }
}
