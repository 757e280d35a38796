use crate::error::Result;
use crate::operators::{Boundary, Hamiltonian};
use crate::qcore::AnisotropyParams;
use crate::scalar::{qpow, Real};
use crate::sector::{tensor_product, Interval};

use super::kink::{build_kink, KinkSpec};

/// One entry of the two-site table for (j, l) ∈ {0,1}²:
/// `value` = ⟨ψ^{+−}_{x}(j) ⊗ ψ^{−+}_{x+1}(l), H⁺⁺_{x,x+1} ψ^{+−}_{[x,x+1]}(j+l)⟩,
/// `overlap` = the same without the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSiteEntry<T> {
    pub j: usize,
    pub l: usize,
    pub value: T,
    pub overlap: T,
}

/// Closed values: −A, Aq², −Aq³, Aq⁵ with overlaps q^{3j+2l}.
pub fn two_site_table_closed<T: Real>(params: &AnisotropyParams<T>) -> [TwoSiteEntry<T>; 4] {
    let (a, q) = (params.a_field, params.q);
    let entry = |j: usize, l: usize, sign: T, e: i64| TwoSiteEntry {
        j,
        l,
        value: sign * a * qpow(q, e),
        overlap: qpow(q, (3 * j + 2 * l) as i64),
    };
    [
        entry(0, 0, -T::one(), 0),
        entry(0, 1, T::one(), 2),
        entry(1, 0, -T::one(), 3),
        entry(1, 1, T::one(), 5),
    ]
}

/// The table computed from the built two-site states.
pub fn two_site_table_direct<T: Real>(params: &AnisotropyParams<T>) -> Result<[TwoSiteEntry<T>; 4]> {
    let q = params.q;
    let pair = Interval::new(1, 2)?;
    let h = Hamiltonian::new(pair, Boundary::DROPLET, *params)?;
    let mut out = two_site_table_closed(params);
    for e in out.iter_mut() {
        let left = build_kink(&KinkSpec::kink(Interval::new(1, 1)?, e.j)?, q)?;
        let right = build_kink(&KinkSpec::antikink(Interval::new(2, 2)?, e.l)?, q)?;
        let bra = tensor_product(&left, &right)?;
        let ket = build_kink(&KinkSpec::kink(pair, e.j + e.l)?, q)?;
        e.value = bra.dot(&h.apply(&ket)?)?;
        e.overlap = bra.dot(&ket)?;
    }
    Ok(out)
}
