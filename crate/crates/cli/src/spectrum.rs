use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::Args;
use rayon::prelude::*;
use xxz_core::operators::{dense_cap, Boundary};
use xxz_core::sector::sector_dimension;
use xxz_core::spectral::{eig_with, Solver};
use xxz_core::{Hamiltonian, SectorBasis};

use crate::output::{csv_writer, fmt_f64};
use crate::{parse_boundary, parse_solver, pool, Anisotropy};

/// Lanczos eigenvalue count when --k is absent.
const DEFAULT_LANCZOS_K: usize = 10;

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    /// Chain length.
    #[arg(long = "L")]
    pub l: usize,
    /// Number of down spins (the magnetisation sector).
    #[arg(long, required_unless_present = "all_sectors", conflicts_with = "all_sectors")]
    pub n: Option<usize>,
    /// Every sector n = 0..L.
    #[arg(long)]
    pub all_sectors: bool,
    #[command(flatten)]
    pub anisotropy: Anisotropy,
    /// Boundary fields: +-, -+, ++, --, 00, ring.
    #[arg(long, default_value = "++", allow_hyphen_values = true, value_parser = parse_boundary)]
    pub bc: Boundary,
    /// dense or lanczos.
    #[arg(long, default_value = "dense", value_parser = parse_solver)]
    pub solver: Solver,
    /// Lowest eigenvalues per sector (dense default: all, lanczos: 10).
    #[arg(long)]
    pub k: Option<usize>,
    /// Lanczos residual tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Lanczos start-vector seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV destination (standard output when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overwrite an existing output file.
    #[arg(long)]
    pub force: bool,
    /// Worker threads for --all-sectors (0: all cores).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

pub fn run(a: &SpectrumArgs) -> Result<ExitCode> {
    let params = a.anisotropy.params()?;
    let h = Hamiltonian::chain(a.l, a.bc, params)?;
    let sectors: Vec<usize> = match a.n {
        Some(n) => vec![n],
        None => (0..=a.l).collect(),
    };
    for &n in &sectors {
        let dim = sector_dimension(a.l, n)? as usize;
        if a.solver == Solver::Dense && dim > dense_cap() {
            bail!(xxz_core::Error::DenseCapExceeded { dim, cap: dense_cap() });
        }
    }
    let k = match (a.k, a.solver) {
        (Some(k), _) => Some(k),
        (None, Solver::Dense) => None,
        (None, Solver::Lanczos) => Some(DEFAULT_LANCZOS_K),
    };
    let blocks = pool(a.jobs)?.install(|| {
        sectors
            .par_iter()
            .map(|&n| -> Result<Vec<f64>> {
                Ok(eig_with(a.solver, &h, SectorBasis::chain(a.l, n)?, k, a.tol, a.seed)?.eigenvalues)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut w = csv_writer(a.out.as_deref(), a.force)?;
    w.write_record(["sector_n", "index", "eigenvalue"])?;
    for (n, values) in sectors.iter().zip(&blocks) {
        for (i, v) in values.iter().enumerate() {
            w.write_record([n.to_string(), i.to_string(), fmt_f64(*v)])?;
        }
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}
