use crate::error::{Error, Result};
use crate::operators::{cut_identity_residual, Boundary, Hamiltonian};
use crate::qcore::{kink_gap, AnisotropyParams};
use crate::sector::{Interval, SectorBasis};
use crate::spectral::{eig_dense, eig_lowest};
use crate::states::{build_kink, two_site_table_closed, two_site_table_direct, KinkSpec};

use super::{CheckReport, ReportBuilder};

const ZERO_TOL: f64 = 1e-10;

fn params(q: f64) -> Result<AnisotropyParams<f64>> {
    AnisotropyParams::from_q(q)
}

fn sector_values(h: &Hamiltonian<f64>, l: usize, n: usize) -> Result<Vec<f64>> {
    Ok(eig_dense(h, SectorBasis::chain(l, n)?, false)?.eigenvalues)
}

/// Kink Hamiltonian on every sector 1 ≤ n ≤ L−1: ground energy 0, gap
/// 1 − Δ⁻¹cos(π/L), and the kink state as the ground vector.
pub fn check_kink_gap(l: usize, q: f64) -> Result<CheckReport> {
    if l < 2 {
        return Err(Error::Domain(format!("kink gap needs L >= 2, got {l}")));
    }
    let p = params(q)?;
    let h = Hamiltonian::chain(l, Boundary::KINK, p)?;
    let gl = kink_gap(l, p.delta)?;
    let (mut e0, mut gap_err, mut angle) = (0.0f64, 0.0f64, 0.0f64);
    for n in 1..l {
        let basis = SectorBasis::chain(l, n)?;
        let vals = eig_dense(&h, basis, false)?.eigenvalues;
        e0 = e0.max(vals[0].abs());
        gap_err = gap_err.max((vals[1] - vals[0] - gl).abs());
        // sin∠(k, ground) ≤ ‖(H − λ₀)k‖ / (λ₁ − λ₀) for a simple ground state.
        let k = build_kink(&KinkSpec::kink(Interval::chain(l)?, n)?, q)?.normalized()?;
        let mut r = h.apply(&k)?;
        r.axpy(-vals[0], &k)?;
        angle = angle.max(r.norm() / (vals[1] - vals[0]));
    }
    let mut b = ReportBuilder::new("kink_gap").param("L", l).param("q", q);
    b.upper("ground_energy_abs", e0, ZERO_TOL)
        .upper("gap_error", gap_err, 1e-9)
        .upper("kink_ground_angle", angle, 1e-6)
        .record("gamma_L", gl);
    Ok(b.finish())
}

/// Free chain: exactly two zero modes (all up, all down) and every other
/// eigenvalue at least ½(1 − Δ⁻¹).
pub fn check_xxz_gap(l: usize, q: f64) -> Result<CheckReport> {
    let p = params(q)?;
    let h = Hamiltonian::chain(l, Boundary::FREE, p)?;
    let (mut zeros, mut zero_abs, mut lowest_rest) = (0usize, 0.0f64, f64::INFINITY);
    for n in 0..=l {
        for v in sector_values(&h, l, n)? {
            if v.abs() <= ZERO_TOL {
                zeros += 1;
                zero_abs = zero_abs.max(v.abs());
            } else {
                lowest_rest = lowest_rest.min(v);
            }
        }
    }
    let mut b = ReportBuilder::new("xxz_gap").param("L", l).param("q", q);
    b.require("two_zero_modes", zeros == 2)
        .record("zero_modes", zeros as f64)
        .record("zero_abs", zero_abs)
        .lower("lowest_nonzero", lowest_rest, p.bond_gap() - ZERO_TOL);
    Ok(b.finish())
}

/// Droplet Hamiltonian: −A is a simple minimum (all up), the rest of the
/// spectrum sits at least ½(1 − Δ⁻¹) above it, and +A occurs (all down).
pub fn check_prop24(l: usize, q: f64) -> Result<CheckReport> {
    let p = params(q)?;
    let a = p.a_field;
    let h = Hamiltonian::chain(l, Boundary::DROPLET, p)?;
    let (mut at_min, mut min_err, mut rest) = (0usize, 0.0f64, f64::INFINITY);
    let mut plus_a = f64::INFINITY;
    for n in 0..=l {
        for v in sector_values(&h, l, n)? {
            if (v + a).abs() <= ZERO_TOL {
                at_min += 1;
                min_err = min_err.max((v + a).abs());
            } else {
                rest = rest.min(v);
            }
            if n == l {
                plus_a = plus_a.min((v - a).abs());
            }
        }
    }
    let mut b = ReportBuilder::new("prop24").param("L", l).param("q", q);
    b.require("unique_minimum", at_min == 1)
        .record("minimum_error", min_err)
        .lower("second_level", rest, -a + p.bond_gap() - ZERO_TOL)
        .upper("all_down_error", plus_a, ZERO_TOL);
    Ok(b.finish())
}

/// Dense diagonalisation of the two-site free and droplet Hamiltonians
/// against their tabulated spectra, and the tabulated droplet matrix
/// elements against the built states.
pub fn check_two_site_tables(q: f64) -> Result<CheckReport> {
    let p = params(q)?;
    let d = p.delta.recip();
    let mut xxz = vec![0.0, 0.0, 0.5 * (1.0 - d), 0.5 * (1.0 + d)];
    let mut dro = vec![-p.a_field, 0.5 * (1.0 - d), p.a_field, 0.5 * (1.0 + d)];
    let full = |bc: Boundary| -> Result<Vec<f64>> {
        let h = Hamiltonian::chain(2, bc, p)?;
        let mut v = Vec::new();
        for n in 0..=2 {
            v.extend(sector_values(&h, 2, n)?);
        }
        v.sort_by(f64::total_cmp);
        Ok(v)
    };
    xxz.sort_by(f64::total_cmp);
    dro.sort_by(f64::total_cmp);
    let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let xxz_err = diff(&full(Boundary::FREE)?, &xxz);
    let dro_err = diff(&full(Boundary::DROPLET)?, &dro);
    let closed = two_site_table_closed(&p);
    let direct = two_site_table_direct(&p)?;
    let elem_err = closed
        .iter()
        .zip(&direct)
        .map(|(c, e)| (c.value - e.value).abs().max((c.overlap - e.overlap).abs()))
        .fold(0.0, f64::max);
    let mut b = ReportBuilder::new("two_site_tables").param("q", q);
    b.upper("xxz_spectrum_error", xxz_err, 1e-13)
        .upper("droplet_spectrum_error", dro_err, 1e-13)
        .upper("matrix_element_error", elem_err, 1e-13);
    Ok(b.finish())
}

/// The three ways of cutting the droplet chain at a bond agree as
/// operators, for every cut and sector.
pub fn check_cut_identities(l: usize, q: f64) -> Result<CheckReport> {
    let p = params(q)?;
    let mut worst = 0.0f64;
    for x in 1..l {
        for n in 0..=l {
            worst = worst.max(cut_identity_residual(l, x, p, n)?);
        }
    }
    let mut b = ReportBuilder::new("cut_identities").param("L", l).param("q", q);
    b.upper("operator_norm_residual", worst, 1e-12);
    Ok(b.finish())
}

/// Dense and Lanczos agree on the `k` lowest eigenvalues of the droplet
/// Hamiltonian in each listed sector, and Lanczos is reproducible for a
/// fixed seed.
pub fn check_solver_agreement(l: usize, sectors: &[usize], q: f64, k: usize, seed: u64) -> Result<CheckReport> {
    let p = params(q)?;
    let h = Hamiltonian::chain(l, Boundary::DROPLET, p)?;
    let tol = 1e-10;
    let (mut worst, mut resid) = (0.0f64, 0.0f64);
    let mut deterministic = true;
    for &n in sectors {
        let basis = SectorBasis::chain(l, n)?;
        let kk = k.min(basis.dim());
        let dense = eig_dense(&h, basis.clone(), false)?.eigenvalues;
        let it = eig_lowest(&h, basis.clone(), kk, tol, seed)?;
        let again = eig_lowest(&h, basis, kk, tol, seed)?;
        deterministic &= it.eigenvalues == again.eigenvalues;
        for (a, b) in dense.iter().zip(&it.eigenvalues) {
            worst = worst.max((a - b).abs());
        }
        resid = it.residuals.iter().copied().fold(resid, f64::max);
    }
    let mut b = ReportBuilder::new("solver_agreement")
        .param("L", l)
        .param("q", q)
        .param("k", k)
        .param("seed", seed)
        .param("sectors", sectors.to_vec());
    b.upper("max_eigenvalue_difference", worst, 1e-8)
        .upper("max_lanczos_residual", resid, 1e-8)
        .require("seed_deterministic", deterministic);
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_spectral_checks_pass() {
        for r in [
            check_kink_gap(6, 0.25).unwrap(),
            check_xxz_gap(5, 0.3).unwrap(),
            check_prop24(5, 0.5).unwrap(),
            check_two_site_tables(0.25).unwrap(),
            check_cut_identities(5, 0.4).unwrap(),
            check_solver_agreement(7, &[0, 3, 7], 0.25, 5, 1).unwrap(),
        ] {
            assert!(r.pass, "{r}\n{r:?}");
        }
    }
}
