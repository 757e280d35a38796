use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use xxz_core::operators::{dense_cap, Boundary, Field};
use xxz_core::sector::sector_dimension;
use xxz_core::spectral::{eig_with, Solver};
use xxz_core::{Hamiltonian, Params, SectorBasis};

use crate::output::write_atomic;
use crate::{parse_boundary, parse_solver, pool};

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Chain lengths, comma separated.
    #[arg(long = "L", value_delimiter = ',', required = true)]
    pub ls: Vec<usize>,
    /// Sectors, comma separated, ranges like 3..9, or "all".
    #[arg(long, default_value = "all")]
    pub n: String,
    /// q values, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub q: Vec<f64>,
    #[arg(long, default_value = "++", allow_hyphen_values = true, value_parser = parse_boundary)]
    pub bc: Boundary,
    #[arg(long, default_value = "dense", value_parser = parse_solver)]
    pub solver: Solver,
    /// Eigenvalues kept per record (default: the band plus one).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// JSON-lines store; existing records are kept and their keys skipped.
    #[arg(long)]
    pub out: PathBuf,
    /// Recompute keys already present in the store.
    #[arg(long)]
    pub force: bool,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

/// One grid point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    /// "L/n/q/boundary/solver".
    pub key: String,
    #[serde(rename = "L")]
    pub l: usize,
    pub n: usize,
    pub q: f64,
    pub boundary: String,
    pub solver: String,
    pub eigenvalues: Vec<f64>,
    /// Levels counted as the low band (see [`band_count`]).
    pub band_count: usize,
    /// Spread of the band, λ_{c−1} − λ₀.
    pub band_width: f64,
    /// λ_c − λ_{c−1}, absent when the sector has no level above the band.
    pub gap: Option<f64>,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub version: String,
}

#[derive(Debug, Clone, Copy)]
struct GridPoint {
    l: usize,
    n: usize,
    q: f64,
}

/// Expected size of the low band in sector n: the L − n + 1 droplets for
/// ++, n + 1 for −−, the L ring droplets, the kink and antikink of the free
/// chain, a single level otherwise; never more than the sector holds.
pub fn band_count(bc: Boundary, l: usize, n: usize, dim: usize) -> usize {
    let interior = n > 0 && n < l;
    let c = match bc {
        Boundary::Open { left: Field::Plus, right: Field::Plus } => l - n + 1,
        Boundary::Open { left: Field::Minus, right: Field::Minus } => n + 1,
        Boundary::Open { left: Field::Zero, right: Field::Zero } if interior => 2,
        Boundary::Periodic if interior => l,
        _ => 1,
    };
    c.min(dim)
}

fn key(p: &GridPoint, bc: Boundary, solver: Solver) -> String {
    format!("{}/{}/{}/{}/{}", p.l, p.n, p.q, bc, solver)
}

fn parse_sectors(spec: &str, l: usize) -> Result<Vec<usize>> {
    if spec == "all" {
        return Ok((0..=l).collect());
    }
    let mut out = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: usize = lo.parse().with_context(|| format!("bad sector range '{part}'"))?;
            let hi: usize = hi.trim_start_matches('=').parse().with_context(|| format!("bad sector range '{part}'"))?;
            out.extend(lo..=hi);
        } else {
            out.push(part.parse().with_context(|| format!("bad sector '{part}'"))?);
        }
    }
    Ok(out)
}

/// Expands and validates the whole grid before anything is computed.
fn grid(a: &SweepArgs) -> Result<Vec<GridPoint>> {
    let mut points = Vec::new();
    for &l in &a.ls {
        Hamiltonian::chain(l, a.bc, Params::from_q(0.25)?)?;
        for n in parse_sectors(&a.n, l)? {
            if n > l {
                bail!("grid point n = {n} exceeds L = {l}");
            }
            let dim = sector_dimension(l, n)? as usize;
            if a.solver == Solver::Dense && dim > dense_cap() {
                bail!(xxz_core::Error::DenseCapExceeded { dim, cap: dense_cap() });
            }
            for &q in &a.q {
                Params::from_q(q)?;
                points.push(GridPoint { l, n, q });
            }
        }
    }
    Ok(points)
}

fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

fn compute(p: &GridPoint, a: &SweepArgs) -> Result<ResultRecord> {
    let started = now();
    let h = Hamiltonian::chain(p.l, a.bc, Params::from_q(p.q)?)?;
    let basis = SectorBasis::chain(p.l, p.n)?;
    let dim = basis.dim();
    let count = band_count(a.bc, p.l, p.n, dim);
    let keep = a.k.unwrap_or(count + 1).min(dim);
    let solve = keep.max(count + 1).min(dim);
    let values = eig_with(a.solver, &h, basis, Some(solve), a.tol, a.seed)?.eigenvalues;
    let band_width = values[count - 1] - values[0];
    let gap = values.get(count).map(|v| v - values[count - 1]);
    Ok(ResultRecord {
        key: key(p, a.bc, a.solver),
        l: p.l,
        n: p.n,
        q: p.q,
        boundary: a.bc.to_string(),
        solver: a.solver.to_string(),
        eigenvalues: values[..keep].to_vec(),
        band_count: count,
        band_width,
        gap,
        started_unix: started,
        finished_unix: now(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    })
}

pub fn load_store(path: &Path) -> Result<Vec<ResultRecord>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| serde_json::from_str(l).with_context(|| format!("{}: bad record on line {}", path.display(), i + 1)))
        .collect()
}

fn render(records: &[ResultRecord]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    for r in records {
        serde_json::to_writer(&mut buf, r)?;
        buf.push(b'\n');
    }
    Ok(buf)
}

pub fn run(a: &SweepArgs) -> Result<ExitCode> {
    let points = grid(a)?;
    let existing = load_store(&a.out)?;
    let done: HashSet<String> = existing.iter().map(|r| r.key.clone()).collect();
    let todo: Vec<GridPoint> =
        points.into_iter().filter(|p| a.force || !done.contains(&key(p, a.bc, a.solver))).collect();
    if todo.is_empty() {
        eprintln!("all grid points already present in {}", a.out.display());
        return Ok(ExitCode::SUCCESS);
    }
    // Touch the store first so an unwritable path fails before any solve.
    write_atomic(&a.out, &render(&existing)?)?;
    let store = Mutex::new(existing);
    pool(a.jobs)?.install(|| {
        todo.par_iter().try_for_each(|p| -> Result<()> {
            let rec = compute(p, a)?;
            let mut records = store.lock().expect("store lock poisoned");
            match records.iter_mut().find(|r| r.key == rec.key) {
                Some(slot) => *slot = rec,
                None => records.push(rec),
            }
            write_atomic(&a.out, &render(&records)?)
        })
    })?;
    eprintln!("wrote {} records to {}", todo.len(), a.out.display());
    Ok(ExitCode::SUCCESS)
}
