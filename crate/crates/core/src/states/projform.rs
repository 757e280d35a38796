use crate::error::{Error, Result};
use crate::operators::{GeneralizedSectorProjector, Projector, Spin};
use crate::qcore::qbinom;
use crate::scalar::{qpow, Real};
use crate::sector::Interval;

use super::droplet::{build_droplet, DropletSpec};
use super::kink::{build_kink, KinkKind, KinkSpec};

fn check_partition(cuts: &[i64], counts: &[i64]) -> Result<i64> {
    if cuts.len() < 2 || cuts.len() != counts.len() + 1 {
        return Err(Error::MalformedPartition(format!(
            "{} cut points for {} counts",
            cuts.len(),
            counts.len()
        )));
    }
    for (w, &c) in cuts.windows(2).zip(counts) {
        if w[1] < w[0] {
            return Err(Error::MalformedPartition(format!("cut points {cuts:?} decrease")));
        }
        if c < 0 || c > w[1] - w[0] {
            return Err(Error::Range(format!("count {c} does not fit in ({}, {}]", w[0], w[1])));
        }
    }
    Ok(counts.iter().sum())
}

/// Exponent of q in ‖Q_{P,n⃗}ψ‖²/‖ψ‖²: Σ_j n_j(2(x_r − x_j) − (n − n_j)) for
/// a kink, Σ_j n_j(2(x_{j−1} − x_0) − (n − n_j)) for an antikink.
pub fn projform_exponent(kind: KinkKind, cuts: &[i64], counts: &[i64]) -> Result<i64> {
    let n = check_partition(cuts, counts)?;
    let (x0, xr) = (cuts[0], cuts[cuts.len() - 1]);
    Ok(counts
        .iter()
        .enumerate()
        .map(|(j, &nj)| {
            let dist = match kind {
                KinkKind::Kink => xr - cuts[j + 1],
                KinkKind::Antikink => cuts[j] - x0,
            };
            nj * (2 * dist - (n - nj))
        })
        .sum())
}

/// ‖Q_{P,n⃗}ψ‖²/‖ψ‖² for ψ the kink or antikink on [x₀+1, x_r] with n = Σn_j
/// down spins: ∏_j [x_j − x_{j−1}  n_j] / [x_r − x₀  n] times q^{exponent}.
pub fn projform_expectation<T: Real>(kind: KinkKind, cuts: &[i64], counts: &[i64], q: T) -> Result<T> {
    let e = projform_exponent(kind, cuts, counts)?;
    let n: i64 = counts.iter().sum();
    let (x0, xr) = (cuts[0], cuts[cuts.len() - 1]);
    let num = cuts
        .windows(2)
        .zip(counts)
        .fold(T::one(), |acc, (w, &nj)| acc * qbinom(w[1] - w[0], nj, q));
    Ok(num / qbinom(xr - x0, n, q) * qpow(q, e))
}

/// The same ratio computed by projecting the built state.
pub fn projform_direct<T: Real>(kind: KinkKind, cuts: &[i64], counts: &[i64], q: T) -> Result<T> {
    let n = check_partition(cuts, counts)?;
    let iv = Interval::new(cuts[0] + 1, cuts[cuts.len() - 1])?;
    let psi = build_kink(&KinkSpec::new(iv, n as usize, kind)?, q)?;
    let proj = Projector::Q(GeneralizedSectorProjector::from_cuts(cuts, counts)?);
    Ok(proj.apply(&psi)?.norm_sq() / psi.norm_sq())
}

/// ⟨ξ_{L,n}(x), G^σ_j ξ_{L,n}(x)⟩ / ‖ξ_{L,n}(x)‖² in closed form, for
/// J = [a,b] and every position of the cut x relative to J.
pub fn g_expectation_closed<T: Real>(
    l: usize,
    n: usize,
    j_interval: Interval,
    x: usize,
    sigma: Spin,
    j: i64,
    q: T,
) -> Result<T> {
    let Interval { a, b } = j_interval;
    if j_interval.is_empty() || a < 1 || b > l as i64 {
        return Err(Error::MalformedPartition(format!("J = {j_interval} must be a nonempty subinterval of [1,{l}]")));
    }
    DropletSpec::new(l, n, x)?;
    let (li, ni, xi) = (l as i64, n as i64, x as i64);
    let jl = j_interval.len() as i64;
    let (fl, ce) = (ni / 2, ni - ni / 2);
    let qb = |m: i64, k: i64| qbinom(m, k, q);
    // Every branch is (numerator, denominator, exponent); a vanishing
    // numerator short-circuits before the power is formed.
    let (num, den, e) = if xi < a {
        let r = a - 1 - xi - j + fl;
        match sigma {
            Spin::Up => (qb(a - 1 - xi, r) * qb(li - b, ni - j), qb(li - xi, ce), 2 * (ni - j) * (jl + r)),
            Spin::Down => (qb(a - 1 - xi, r) * qb(li - b, ni - j - jl), qb(li - xi, ce), 2 * (ni - j) * r),
        }
    } else if xi <= b {
        let den = qb(xi, fl) * qb(li - xi, ce);
        match sigma {
            Spin::Up if j == fl => (
                qb(a - 1, fl) * qb(li - b, ce),
                den,
                2 * (fl * (xi - a + 1) + ce * (b - xi)),
            ),
            Spin::Down if j == fl - xi + a - 1 => (qb(a - 1, xi - fl) * qb(li - b, li - xi - ce), den, 0),
            _ => (T::zero(), den, 0),
        }
    } else {
        match sigma {
            Spin::Up => {
                let r = xi - b - fl + j;
                (qb(a - 1, j) * qb(xi - b, r), qb(xi, fl), 2 * j * (jl + r))
            }
            Spin::Down => {
                let r = xi - a + 1 - fl + j;
                (qb(a - 1, j) * qb(xi - b, r), qb(xi, fl), 2 * (j + jl) * r)
            }
        }
    };
    if num == T::zero() {
        return Ok(T::zero());
    }
    Ok(num / den * qpow(q, e))
}

/// The same expectation computed by projecting the built droplet.
pub fn g_expectation_direct<T: Real>(
    l: usize,
    n: usize,
    j_interval: Interval,
    x: usize,
    sigma: Spin,
    j: i64,
    q: T,
) -> Result<T> {
    let xi = build_droplet(&DropletSpec::new(l, n, x)?, q)?;
    let g = Projector::g(l, n, j_interval, sigma, j)?;
    Ok(g.apply(&xi)?.norm_sq() / xi.norm_sq())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_part_is_one() {
        assert_eq!(projform_expectation(KinkKind::Kink, &[0, 5], &[2], 0.3f64).unwrap(), 1.0);
        assert_eq!(projform_expectation(KinkKind::Antikink, &[2, 6], &[4], 0.3f64).unwrap(), 1.0);
    }

    #[test]
    fn three_site_example() {
        let q = 0.25f64;
        let closed = projform_expectation(KinkKind::Kink, &[0, 1, 3], &[1, 0], q).unwrap();
        let direct = projform_direct(KinkKind::Kink, &[0, 1, 3], &[1, 0], q).unwrap();
        assert!((closed - direct).abs() < 1e-15);
        // Only |↓↑↑⟩ survives: q⁶ / (q² + q⁴ + q⁶).
        let want = q.powi(6) / (q * q + q.powi(4) + q.powi(6));
        assert!((closed - want).abs() < 1e-15);
    }

    #[test]
    fn g_down_example() {
        let q = 0.25f64;
        let j = Interval::new(3, 4).unwrap();
        let t = q * q;
        let want = 1.0 / (1.0 + t + t * t).powi(2);
        let closed = g_expectation_closed(6, 2, j, 3, Spin::Down, 0, q).unwrap();
        let direct = g_expectation_direct(6, 2, j, 3, Spin::Down, 0, q).unwrap();
        assert!((closed - want).abs() < 1e-15);
        assert!((direct - want).abs() < 1e-15);
        assert_eq!(g_expectation_closed(6, 2, j, 3, Spin::Down, 1, q).unwrap(), 0.0);
    }

    #[test]
    fn errors() {
        assert!(projform_expectation(KinkKind::Kink, &[0, 2], &[3], 0.5f64).is_err());
        assert!(projform_expectation(KinkKind::Kink, &[0, 2, 1], &[0, 0], 0.5f64).is_err());
        let bad = Interval::new(5, 9).unwrap();
        assert!(g_expectation_closed(6, 2, bad, 3, Spin::Up, 0, 0.5f64).is_err());
    }
}
