//! Independent oracles: exact rational arithmetic at q = 1/4 and q = 1/2,
//! the full 2^L Hamiltonian assembled from Kronecker products of spin
//! matrices, and frozen values of closed forms.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use xxz_core::linalg::{symmetric_eigen, Matrix};
use xxz_core::operators::{assemble_dense, Boundary, Field, Hamiltonian};
use xxz_core::qcore::{fq_inf, kink_gap, qbinom, AnisotropyParams};
use xxz_core::spectral::eig_dense;
use xxz_core::states::{build_kink, kink_norm_sq_closed, mixed_overlap_closed, KinkSpec};
use xxz_core::{Interval, SectorBasis};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap()
}

fn rpow(x: &BigRational, e: u32) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * x)
}

/// Gaussian binomial from the product formula ∏ (1 − t^{m−i}) / (1 − t^{i+1}).
fn qbinom_exact(m: u32, k: u32, t: &BigRational) -> BigRational {
    if k > m {
        return BigRational::zero();
    }
    let one = BigRational::one();
    (0..k).fold(one.clone(), |acc, i| acc * (&one - rpow(t, m - i)) / (&one - rpow(t, i + 1)))
}

#[test]
fn rational_parameters_at_quarter() {
    let p = AnisotropyParams::from_q(0.25f64).unwrap();
    let q = rat(1, 4);
    let q2 = &q * &q;
    let one = BigRational::one();
    let delta = (&q + q.recip()) / rat(2, 1);
    let a = (&one - &q2) / (rat(2, 1) * (&one + &q2));
    let gamma = &one - delta.recip();
    assert_eq!(delta, rat(17, 8));
    assert_eq!(a, rat(15, 34));
    assert_eq!(gamma, rat(9, 17));
    assert_eq!(p.delta, to_f64(&delta));
    assert!((p.a_field - to_f64(&a)).abs() <= f64::EPSILON);
    assert!((p.gamma - to_f64(&gamma)).abs() <= f64::EPSILON);
    assert!((kink_gap(3, p.delta).unwrap() - 13.0 / 17.0).abs() < 1e-15);
}

#[test]
fn gaussian_binomials_against_product_formula() {
    for (qn, qd) in [(1, 4), (1, 2), (3, 5)] {
        let t = rpow(&rat(qn, qd), 2);
        let q = qn as f64 / qd as f64;
        for m in 0..=14u32 {
            for k in 0..=m {
                let exact = to_f64(&qbinom_exact(m, k, &t));
                let got = qbinom(m as i64, k as i64, q);
                assert!((got - exact).abs() <= 1e-14 * exact, "[{m} {k}] at q={q}: {got} vs {exact}");
            }
        }
    }
}

/// Exact ‖ψ‖² and ⟨kink, antikink⟩ by summing q-powers over configurations.
#[test]
fn kink_norms_and_mixed_overlaps_exact() {
    let q = rat(1, 4);
    for len in 1..=7u32 {
        for n in 0..=len {
            let mut norm = BigRational::zero();
            let mut mixed = BigRational::zero();
            for mask in 0u32..1 << len {
                if mask.count_ones() != n {
                    continue;
                }
                let sites: Vec<u32> = (1..=len).filter(|s| mask >> (s - 1) & 1 == 1).collect();
                let kink_e: u32 = sites.iter().map(|&x| len + 1 - x).sum();
                let anti_e: u32 = sites.iter().copied().sum();
                norm += rpow(&q, 2 * kink_e);
                mixed += rpow(&q, kink_e + anti_e);
            }
            let closed = kink_norm_sq_closed(len as usize, n as usize, 0.25f64).unwrap();
            assert!((closed - to_f64(&norm)).abs() <= 1e-14 * to_f64(&norm));
            let m = mixed_overlap_closed(len as usize, n as usize, n as usize, 0.25f64).unwrap();
            assert!((m - to_f64(&mixed)).abs() <= 1e-14 * to_f64(&mixed), "len {len} n {n}");
            let built = build_kink(&KinkSpec::kink(Interval::chain(len as usize).unwrap(), n as usize).unwrap(), 0.25)
                .unwrap();
            assert!((built.norm_sq() - to_f64(&norm)).abs() <= 1e-14 * to_f64(&norm));
        }
    }
}

#[test]
fn mixed_overlap_spec_values() {
    assert_eq!(mixed_overlap_closed(2, 1, 1, 0.25f64).unwrap(), 0.03125);
    assert_eq!(mixed_overlap_closed(3, 0, 0, 0.25f64).unwrap(), 1.0);
    assert_eq!(mixed_overlap_closed(3, 1, 2, 0.25f64).unwrap(), 0.0);
}

#[test]
fn two_site_spectra_exact() {
    let p = AnisotropyParams::from_q(0.25f64).unwrap();
    let spectrum = |bc: Boundary| {
        let h = Hamiltonian::chain(2, bc, p).unwrap();
        let mut v: Vec<f64> = (0..=2)
            .flat_map(|n| eig_dense(&h, SectorBasis::chain(2, n).unwrap(), false).unwrap().eigenvalues)
            .collect();
        v.sort_by(f64::total_cmp);
        v
    };
    let want_droplet = [-15.0 / 34.0, 9.0 / 34.0, 15.0 / 34.0, 25.0 / 34.0];
    let want_free = [0.0, 0.0, 9.0 / 34.0, 25.0 / 34.0];
    for (got, want) in spectrum(Boundary::DROPLET).iter().zip(want_droplet) {
        assert!((got - want).abs() < 1e-15);
    }
    for (got, want) in spectrum(Boundary::FREE).iter().zip(want_free) {
        assert!((got - want).abs() < 1e-15);
    }
}

/// Dense matrix on the full space, index bit (s − 1) set when site s is down.
fn kron_hamiltonian(l: usize, bc: Boundary, p: &AnisotropyParams<f64>) -> Vec<Vec<f64>> {
    let dim = 1usize << l;
    // Spin matrices in the (up, down) basis.
    let sz = [[0.5, 0.0], [0.0, -0.5]];
    let sp = [[0.0, 1.0], [0.0, 0.0]];
    let sm = [[0.0, 0.0], [1.0, 0.0]];
    let id = [[1.0, 0.0], [0.0, 1.0]];
    // ⊗_s ops[s]; each later site becomes the more significant factor.
    let kron = |ops: &[[[f64; 2]; 2]]| -> Vec<Vec<f64>> {
        let mut m = vec![vec![1.0]];
        for op in ops {
            let d = m.len();
            let mut next = vec![vec![0.0; 2 * d]; 2 * d];
            for (a, row) in op.iter().enumerate() {
                for (b, &o) in row.iter().enumerate() {
                    for i in 0..d {
                        for j in 0..d {
                            next[a * d + i][b * d + j] = o * m[i][j];
                        }
                    }
                }
            }
            m = next;
        }
        m
    };
    let single = |site: usize, op: [[f64; 2]; 2]| {
        let ops: Vec<_> = (0..l).map(|s| if s == site { op } else { id }).collect();
        kron(&ops)
    };
    let pair = |x: usize, y: usize, a: [[f64; 2]; 2], b: [[f64; 2]; 2]| {
        let ops: Vec<_> = (0..l).map(|s| if s == x { a } else if s == y { b } else { id }).collect();
        kron(&ops)
    };
    let mut h = vec![vec![0.0; dim]; dim];
    let mut add = |m: Vec<Vec<f64>>, c: f64| {
        for i in 0..dim {
            for j in 0..dim {
                h[i][j] += c * m[i][j];
            }
        }
    };
    let mut bonds: Vec<(usize, usize)> = (0..l - 1).map(|x| (x, x + 1)).collect();
    if bc == Boundary::RING && l > 2 {
        bonds.push((l - 1, 0));
    }
    let dinv = 1.0 / p.delta;
    for (x, y) in bonds {
        // −Δ⁻¹(S¹S¹ + S²S²) − (S³S³ − ¼) with S¹S¹ + S²S² = ½(S⁺S⁻ + S⁻S⁺).
        add(pair(x, y, sp, sm), -0.5 * dinv);
        add(pair(x, y, sm, sp), -0.5 * dinv);
        add(pair(x, y, sz, sz), -1.0);
        add(kron(&vec![id; l]), 0.25);
    }
    if let Boundary::Open { left, right } = bc {
        add(single(0, sz), -p.a_field * left.sign() as f64);
        add(single(l - 1, sz), -p.a_field * right.sign() as f64);
    }
    h
}

#[test]
fn kronecker_full_space_agrees_with_sectors() {
    let p = AnisotropyParams::from_q(0.3f64).unwrap();
    let boundaries = [
        Boundary::KINK,
        Boundary::ANTIKINK,
        Boundary::DROPLET,
        Boundary::FREE,
        Boundary::Open { left: Field::Minus, right: Field::Minus },
        Boundary::RING,
    ];
    for l in 2..=6 {
        for bc in boundaries {
            if bc == Boundary::RING && l < 3 {
                continue;
            }
            let full = kron_hamiltonian(l, bc, &p);
            let h = Hamiltonian::chain(l, bc, p).unwrap();
            let mut sector_values = Vec::new();
            for n in 0..=l {
                let basis = SectorBasis::chain(l, n).unwrap();
                let m = assemble_dense(&h, basis.clone()).unwrap();
                let masks = basis.masks();
                for (i, &mi) in masks.iter().enumerate() {
                    for (j, &mj) in masks.iter().enumerate() {
                        let want = full[mi as usize][mj as usize];
                        assert!((m[(i, j)] - want).abs() < 1e-15, "L={l} {bc} n={n}");
                    }
                }
                sector_values.extend(symmetric_eigen(m, false).unwrap().values);
            }
            sector_values.sort_by(f64::total_cmp);
            let dim = 1 << l;
            let full_m = Matrix::from_fn(dim, dim, |i, j| full[i][j]);
            let values = symmetric_eigen(full_m, false).unwrap().values;
            for (a, b) in values.iter().zip(&sector_values) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn frozen_closed_form_values() {
    // 1 − (8/17)·cos(π/4).
    assert!((kink_gap(4, 2.125f64).unwrap() - 0.667_243_867_676_918_8).abs() < 1e-15);
    assert!((kink_gap(12, 2.125f64).unwrap() - 0.545_446_6).abs() < 1e-6);
    assert_eq!(kink_gap(2, 1.25f64).unwrap(), 1.0);
    assert!((fq_inf(0.25f64) - 0.933_594_707_399_603_2).abs() < 1e-15);
    // ½(1 − 8/17) = 9/34.
    assert!((AnisotropyParams::from_q(0.25f64).unwrap().bond_gap() - 9.0 / 34.0).abs() < 1e-16);
}

/// The droplet chain at L = 12, q = 1/4 has L − n + 1 levels within
/// 1.9·qⁿ of A = 15/34 in each sector, the next one close to A + γ.
#[test]
fn figure_regime_band_structure() {
    let p = AnisotropyParams::from_q(0.25f64).unwrap();
    let h = Hamiltonian::chain(12, Boundary::DROPLET, p).unwrap();
    for n in [4, 6, 8] {
        let vals = eig_dense(&h, SectorBasis::chain(12, n).unwrap(), false).unwrap().eigenvalues;
        let band = 12 - n + 1;
        let dev = vals[..band].iter().map(|v| (v - 15.0 / 34.0).abs()).fold(0.0, f64::max);
        assert!(dev < 1.9 * 0.25f64.powi(n as i32), "n={n} dev={dev}");
        assert!(vals[band] > p.a_field + p.gamma - 0.08, "n={n}");
    }
}
