use crate::error::{Error, Result};
use crate::operators::{Boundary, Hamiltonian};
use crate::qcore::AnisotropyParams;
use crate::scalar::qpow;
use crate::spectral::{gram_projector, projector_distance, DropletFamily};
use crate::states::{ring_translation_overlap_closed, ring_translation_overlap_direct};

use super::band::lowest_band_projector;
use super::{CheckReport, ReportBuilder};

/// Frozen ring constants at q = ¼: band_c bounds max|λ_k − 2A|/(qⁿ + q^{L−n})
/// over the L lowest levels, gap_eps the shortfall of λ_{L+1} below 2A + γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingConstants {
    pub band_c: f64,
    pub gap_eps: f64,
}

impl RingConstants {
    /// Calibrated at L ∈ {8, 10, 12}, 3 ≤ n ≤ L − 3, q = ¼, with 10% slack.
    pub const FROZEN: Self = Self { band_c: 2.371, gap_eps: 0.1123 };
}

struct RingMeasurement {
    band_c: f64,
    gap_excess: Option<f64>,
    dist: Option<f64>,
}

fn ring_measurement(l: usize, n: usize, p: &AnisotropyParams<f64>) -> Result<RingMeasurement> {
    if n > l {
        return Err(Error::Range(format!("{n} down spins do not fit on {l} sites")));
    }
    let h = Hamiltonian::chain(l, Boundary::RING, *p)?;
    let dim = crate::sector::sector_dimension(l, n)? as usize;
    let count = l.min(dim);
    let (vals, eig_proj) = lowest_band_projector(&h, l, n, count)?;
    let scale = qpow(p.q, n as i64) + qpow(p.q, (l - n) as i64);
    let two_a = 2.0 * p.a_field;
    let band_c = vals[..count].iter().map(|v| (v - two_a).abs()).fold(0.0, f64::max) / scale;
    let gap_excess = vals.get(l).map(|v| v - two_a - p.gamma);
    let dist = match gram_projector(&DropletFamily::ring_droplets(l, n, p.q)?) {
        Ok(k) => Some(projector_distance(&k, &eig_proj)?),
        Err(Error::RankDeficient { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(RingMeasurement { band_c, gap_excess, dist })
}

/// Ring band, gap above it, droplet span distance, and the translation
/// overlap series against direct overlaps.
pub fn check_ring(l: usize, n: usize, q: f64, c: &RingConstants) -> Result<CheckReport> {
    let p = AnisotropyParams::from_q(q)?;
    let m = ring_measurement(l, n, &p)?;
    let mut b = ReportBuilder::new("ring").param("L", l).param("n", n).param("q", q);
    b.upper("band_c", m.band_c, c.band_c);
    match m.gap_excess {
        Some(g) => {
            b.lower("gap_excess", g, -c.gap_eps);
        }
        None => {
            b.note("sector has no level above the L lowest");
        }
    }
    match m.dist {
        Some(d) => {
            b.record("droplet_span_distance", d);
        }
        None => {
            b.note("ring droplets are linearly dependent in this sector");
        }
    }
    let mut worst = 0.0f64;
    for x in 0..=l / 2 {
        let closed = ring_translation_overlap_closed(l, n, x, q)?;
        let direct = ring_translation_overlap_direct(l, n, x, q)?;
        worst = worst.max((closed - direct).abs());
    }
    b.upper("translation_overlap_error", worst, 1e-12);
    Ok(b.finish())
}

/// Measures the ring constants over L ∈ `ls`, 3 ≤ n ≤ L − 3, with the
/// requested relative slack.
pub fn calibrate_ring(ls: &[usize], q: f64, slack: f64) -> Result<RingConstants> {
    let p = AnisotropyParams::from_q(q)?;
    let (mut band_c, mut gap_eps) = (0.0f64, 0.0f64);
    for &l in ls {
        for n in 3..=l.saturating_sub(3) {
            let m = ring_measurement(l, n, &p)?;
            band_c = band_c.max(m.band_c);
            if let Some(g) = m.gap_excess {
                gap_eps = gap_eps.max(-g);
            }
        }
    }
    let s = 1.0 + slack;
    Ok(RingConstants { band_c: band_c * s, gap_eps: gap_eps * s })
}
