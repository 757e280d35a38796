use crate::error::Result;
use crate::scalar::Real;
use crate::sector::{low_bits, SectorVector};

/// Cyclic shift T: the content of site i moves to site i+1, the last site
/// wraps to the first.
pub fn translate<T: Real>(v: &SectorVector<T>) -> Result<SectorVector<T>> {
    translate_by(v, 1)
}

/// T^x for any integer x (negative shifts go the other way).
pub fn translate_by<T: Real>(v: &SectorVector<T>, x: i64) -> Result<SectorVector<T>> {
    let len = v.interval().len();
    if len == 0 {
        return Ok(v.clone());
    }
    let s = x.rem_euclid(len as i64) as u32;
    if s == 0 {
        return Ok(v.clone());
    }
    let full = low_bits(len);
    let mut out = SectorVector::zeros(v.basis.clone());
    for (&mask, &amp) in v.basis.masks().iter().zip(&v.amplitudes) {
        let moved = ((mask << s) | (mask >> (len as u32 - s))) & full;
        out.amplitudes[v.basis.rank_mask(moved)] = amp;
    }
    Ok(out)
}
