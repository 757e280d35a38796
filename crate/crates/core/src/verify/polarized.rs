use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::operators::{assemble_dense, Boundary, Hamiltonian, Projector};
use crate::qcore::AnisotropyParams;
use crate::sector::{Interval, SectorBasis, SectorVector};
use crate::spectral::eig_lowest;
use crate::states::{build_droplet, DropletSpec};

use super::{CheckReport, ReportBuilder};

/// Where the test vector of [`check_polarized_interval`] comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateSource {
    /// Lowest eigenvector of the droplet Hamiltonian in sector n.
    GroundState { n: usize },
    Droplet { n: usize, x: usize },
    /// Uniform entries in [−1, 1] drawn from the seed.
    Random { n: usize, seed: u64 },
    AllUp,
}

impl StateSource {
    fn label(&self) -> String {
        match self {
            StateSource::GroundState { n } => format!("ground_state(n={n})"),
            StateSource::Droplet { n, x } => format!("droplet(n={n},x={x})"),
            StateSource::Random { n, seed } => format!("random(n={n},seed={seed})"),
            StateSource::AllUp => "all_up".into(),
        }
    }

    fn build(&self, l: usize, p: &AnisotropyParams<f64>) -> Result<SectorVector<f64>> {
        let v = match *self {
            StateSource::GroundState { n } => {
                let h = Hamiltonian::chain(l, Boundary::DROPLET, *p)?;
                let r = eig_lowest(&h, SectorBasis::chain(l, n)?, 1, 1e-11, 0)?;
                r.eigenvectors.expect("lanczos returns vectors").remove(0)
            }
            StateSource::Droplet { n, x } => build_droplet(&DropletSpec::new(l, n, x)?, p.q)?,
            StateSource::Random { n, seed } => {
                let basis = SectorBasis::chain(l, n)?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let amps = (0..basis.dim()).map(|_| rng.random_range(-1.0..=1.0)).collect();
                SectorVector::from_amplitudes(basis, amps)?
            }
            StateSource::AllUp => SectorVector::basis_state(SectorBasis::chain(l, 0)?, 0),
        };
        v.normalized()
    }
}

/// ‖[P_J,[P_J,H]]‖ on one sector. P_J is diagonal, so the double
/// commutator PH + HP − 2PHP keeps exactly the entries of H joining a
/// configuration polarised on J to one that is not.
fn double_commutator_norm(h: &Matrix<f64>, basis: &SectorBasis, j: &Interval) -> Result<f64> {
    let p = Projector::p_j(*j);
    let ambient = basis.interval();
    let acc: Vec<bool> = basis.masks().iter().map(|&m| p.accepts(m, &ambient)).collect();
    let d = h.rows();
    let m = Matrix::from_fn(d, d, |r, c| if acc[r] != acc[c] { h[(r, c)] } else { 0.0 });
    m.symmetric_norm()
}

/// Exhaustive search for the interval J of length `block` carrying the most
/// weight of ψ on polarised configurations, checked against the weight
/// bound 1 − 2E/(γ⌊L/l⌋), the energy comparison for P_Jψ, the version with
/// the boundary fields, and ‖[P_J,[P_J,H]]‖ ≤ Δ⁻¹.
pub fn check_polarized_interval(l: usize, q: f64, block: usize, source: StateSource) -> Result<CheckReport> {
    if block == 0 || block >= l {
        return Err(Error::Range(format!("block length {block} must satisfy 1 <= l < L = {l}")));
    }
    let p = AnisotropyParams::from_q(q)?;
    let psi = source.build(l, &p)?;
    let free = Hamiltonian::chain(l, Boundary::FREE, p)?;
    let dro = Hamiltonian::chain(l, Boundary::DROPLET, p)?;
    let e = free.rayleigh(&psi)?;
    let parts = (l / block) as f64;
    let eps = 2.0 * e / (p.gamma * parts);

    let mut best = (f64::NEG_INFINITY, Interval::new(1, block as i64)?);
    for a in 1..=(l - block + 1) as i64 {
        let j = Interval::new(a, a + block as i64 - 1)?;
        let w = Projector::p_j(j).apply(&psi)?.norm_sq();
        if w > best.0 {
            best = (w, j);
        }
    }
    let (weight, j) = best;
    let pj_psi = Projector::p_j(j).apply(&psi)?;
    let dinv = p.delta.recip();

    let mut b = ReportBuilder::new("polarized_interval")
        .param("L", l)
        .param("q", q)
        .param("block", block)
        .param("source", source.label())
        .param("best_J", j.to_string());
    b.record("energy", e).record("epsilon", eps);
    b.lower("best_polarized_weight", weight, 1.0 - eps);
    if eps < 1.0 && weight > 0.0 {
        let rho = free.rayleigh(&pj_psi)?;
        b.upper("projected_energy", rho, e / (1.0 - eps) + 2.0 * dinv * (eps / (1.0 - eps)).sqrt());
    }

    // Boundary fields as a perturbation of norm M = A.
    let m = p.a_field;
    let e_fields = dro.rayleigh(&psi)?;
    let eps_fields = 2.0 * (e_fields + m) / (p.gamma * parts);
    let delta_w = (1.0 - weight).max(0.0);
    b.record("epsilon_with_fields", eps_fields);
    if eps_fields < 1.0 {
        b.upper("excluded_weight", delta_w, eps_fields);
    }
    let lhs = e_fields - dro.apply(&pj_psi)?.dot(&pj_psi)?;
    let penalty = m * delta_w + 2.0 * (dinv + 2.0 * m) * (delta_w * (1.0 - delta_w)).sqrt();
    b.lower("field_energy_comparison", lhs, -penalty);
    if eps_fields <= 0.5 {
        let stated = m * eps_fields + 2.0 * (dinv + 2.0 * m) * (eps_fields * (1.0 - eps_fields)).sqrt();
        b.record("field_penalty_stated", stated);
    }

    let basis = psi.basis.clone();
    let hd = assemble_dense(&free, basis.clone())?;
    let dc = double_commutator_norm(&hd, &basis, &j)?;
    b.upper("double_commutator_norm", dc, dinv + 1e-12);
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::double_commutator_apply;

    #[test]
    fn sources_pass() {
        for src in [
            StateSource::AllUp,
            StateSource::Droplet { n: 4, x: 4 },
            StateSource::GroundState { n: 3 },
            StateSource::Random { n: 2, seed: 5 },
        ] {
            let r = check_polarized_interval(8, 0.25, 2, src).unwrap();
            assert!(r.pass, "{r:?}");
        }
        let up = check_polarized_interval(6, 0.25, 3, StateSource::AllUp).unwrap();
        assert_eq!(up.measured["best_polarized_weight"], 1.0);
        assert!(check_polarized_interval(6, 0.25, 6, StateSource::AllUp).is_err());
    }

    #[test]
    fn masked_commutator_matches_operator() {
        let p = AnisotropyParams::from_q(0.3).unwrap();
        let h = Hamiltonian::chain(7, Boundary::FREE, p).unwrap();
        let basis = SectorBasis::chain(7, 3).unwrap();
        let hd = assemble_dense(&h, basis.clone()).unwrap();
        let j = Interval::new(3, 5).unwrap();
        let pj = Projector::p_j(j);
        let ambient = basis.interval();
        let d = hd.rows();
        let acc: Vec<bool> = basis.masks().iter().map(|&m| pj.accepts(m, &ambient)).collect();
        let masked = Matrix::from_fn(d, d, |r, c| if acc[r] != acc[c] { hd[(r, c)] } else { 0.0 });
        let v = SectorVector::from_fn(basis, |m| (m % 11) as f64 - 5.0);
        let want = double_commutator_apply(&h, j, &v).unwrap();
        let got = masked.matvec(&v.amplitudes);
        for (a, b) in want.amplitudes.iter().zip(&got) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
