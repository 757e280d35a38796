//! `xxz`: spectra, state and overlap tables, the verification suite and
//! resumable parameter sweeps for the XXZ chain with boundary fields.

mod output;
mod spectrum;
mod sweep;
mod tables;
mod verify;

use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use xxz_core::operators::Boundary;
use xxz_core::spectral::Solver;
use xxz_core::verify::Profile;
use xxz_core::Params;

#[derive(Parser, Debug)]
#[command(name = "xxz", version, about = "Exact diagonalisation and closed-form checks for the XXZ chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues of one or all magnetisation sectors as CSV.
    Spectrum(spectrum::SpectrumArgs),
    /// Run named checks and write their reports as a JSON array.
    Verify(verify::VerifyArgs),
    /// Spectra over a grid of (L, n, q), appended to a JSON-lines store.
    Sweep(sweep::SweepArgs),
    /// Amplitudes of a kink, antikink, droplet or ring droplet as CSV.
    State(tables::StateArgs),
    /// Droplet or ring translation overlaps, closed form against direct.
    Overlap(tables::OverlapArgs),
}

/// Anisotropy given either as q ∈ (0,1) or as Δ > 1.
#[derive(Args, Debug, Clone, Copy)]
pub struct Anisotropy {
    /// Deformation parameter q ∈ (0,1).
    #[arg(long, conflicts_with = "delta")]
    pub q: Option<f64>,
    /// Anisotropy Δ > 1, converted to q.
    #[arg(long)]
    pub delta: Option<f64>,
}

impl Anisotropy {
    /// Resolved parameters, q = ¼ when neither flag is given.
    pub fn params(&self) -> Result<Params> {
        Ok(match (self.q, self.delta) {
            (Some(_), Some(_)) => bail!("--q and --delta are mutually exclusive"),
            (_, Some(d)) => Params::from_delta(d)?,
            (q, None) => Params::from_q(q.unwrap_or(0.25))?,
        })
    }
}

pub fn parse_boundary(s: &str) -> Result<Boundary, String> {
    s.parse().map_err(|e: xxz_core::Error| e.to_string())
}

pub fn parse_solver(s: &str) -> Result<Solver, String> {
    s.parse().map_err(|e: xxz_core::Error| e.to_string())
}

pub fn parse_profile(s: &str) -> Result<Profile, String> {
    s.parse().map_err(|e: xxz_core::Error| e.to_string())
}

/// Worker pool of the requested width (0 lets rayon decide).
pub fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Spectrum(a) => spectrum::run(&a),
        Command::Verify(a) => verify::run(&a),
        Command::Sweep(a) => sweep::run(&a),
        Command::State(a) => tables::run_state(&a),
        Command::Overlap(a) => tables::run_overlap(&a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
