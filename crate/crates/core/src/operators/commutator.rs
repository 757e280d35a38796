use crate::error::{Error, Result};
use crate::qcore::AnisotropyParams;
use crate::scalar::Real;
use crate::sector::{Interval, SectorVector};

use super::hamiltonian::Hamiltonian;
use super::projector::Projector;

/// A_{x,y} = |↑↓⟩⟨↓↑| + |↓↑⟩⟨↑↓| on the sites x, y: swaps anti-aligned
/// pairs and annihilates aligned ones.
pub fn flip_bond<T: Real>(x: i64, y: i64, v: &SectorVector<T>) -> Result<SectorVector<T>> {
    let iv = v.interval();
    if !iv.contains(x) || !iv.contains(y) || x == y {
        return Err(Error::Range(format!("bond ({x},{y}) not inside {iv}")));
    }
    let bm = (1u64 << iv.offset(x)) | (1u64 << iv.offset(y));
    let mut out = SectorVector::zeros(v.basis.clone());
    for (&mask, &amp) in v.basis.masks().iter().zip(&v.amplitudes) {
        let pair = mask & bm;
        if pair != 0 && pair != bm {
            out.amplitudes[v.basis.rank_mask(mask ^ bm)] = amp;
        }
    }
    Ok(out)
}

fn check_inside(chain: Interval, j: Interval) -> Result<()> {
    if j.is_empty() || j.a <= chain.a || j.b >= chain.b {
        return Err(Error::TouchesBoundary { interval: j, chain });
    }
    Ok(())
}

/// [P_J,[P_J,H]]v = (P_J H + H P_J − 2 P_J H P_J)v for J strictly inside
/// the Hamiltonian's interval.
pub fn double_commutator_apply<T: Real>(h: &Hamiltonian<T>, j: Interval, v: &SectorVector<T>) -> Result<SectorVector<T>> {
    check_inside(h.interval, j)?;
    let p = Projector::p_j(j);
    let op = h.on(v.basis.clone())?;
    let pv = p.apply(v)?;
    let hv = op.apply(v)?;
    let hpv = op.apply(&pv)?;
    let mut out = p.apply(&hv)?;
    out.axpy(T::one(), &hpv)?;
    out.axpy(-T::lit(2.0), &p.apply(&hpv)?)?;
    Ok(out)
}

/// −(2Δ)⁻¹(A_{a−1,a} P_{[a+1,b]} + P_{[a,b−1]} A_{b,b+1})v for J = [a,b],
/// the explicit form of the double commutator with the free chain when
/// |J| ≥ 2.
pub fn double_commutator_closed_form<T: Real>(
    params: &AnisotropyParams<T>,
    chain: Interval,
    j: Interval,
    v: &SectorVector<T>,
) -> Result<SectorVector<T>> {
    check_inside(chain, j)?;
    if j.len() < 2 {
        return Err(Error::Range(format!(
            "closed form needs |J| >= 2 (for |J| = 1, P_J = 1 and the commutator vanishes), got {j}"
        )));
    }
    let Interval { a, b } = j;
    let left = flip_bond(a - 1, a, &Projector::p_j(Interval::new(a + 1, b)?).apply(v)?)?;
    let right = flip_bond(b, b + 1, &Projector::p_j(Interval::new(a, b - 1)?).apply(v)?)?;
    let mut out = left;
    out.axpy(T::one(), &right)?;
    Ok(out.scaled(-T::lit(0.5) / params.delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::Boundary;
    use crate::sector::SectorBasis;

    #[test]
    fn closed_form_agrees() {
        let p = AnisotropyParams::from_q(0.25).unwrap();
        let l = 7;
        let h = Hamiltonian::chain(l, Boundary::FREE, p).unwrap();
        for n in 0..=l {
            let b = SectorBasis::chain(l, n).unwrap();
            let v = SectorVector::from_fn(b, |m| (m.wrapping_mul(2654435761) % 97) as f64 - 48.0);
            for (a, bb) in [(2, 3), (2, 6), (3, 5), (4, 6)] {
                let j = Interval::new(a, bb).unwrap();
                let x = double_commutator_apply(&h, j, &v).unwrap();
                let y = double_commutator_closed_form(&p, h.interval, j, &v).unwrap();
                assert!(x.max_abs_diff(&y).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn boundary_touching_rejected() {
        let p = AnisotropyParams::from_q(0.25).unwrap();
        let h = Hamiltonian::chain(5, Boundary::FREE, p).unwrap();
        let v = SectorVector::<f64>::zeros(SectorBasis::chain(5, 2).unwrap());
        let j = Interval::new(1, 2).unwrap();
        assert!(matches!(double_commutator_apply(&h, j, &v), Err(Error::TouchesBoundary { .. })));
        let single = Interval::new(3, 3).unwrap();
        assert!(double_commutator_closed_form(&p, h.interval, single, &v).is_err());
    }
}
