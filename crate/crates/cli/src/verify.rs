use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::Args;
use rayon::prelude::*;
use xxz_core::verify::{run_check, suite, CheckArgs, CheckReport, Profile, CHECK_NAMES};

use crate::output::sink;
use crate::{parse_profile, pool, Anisotropy};

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Check to run (repeatable).
    #[arg(long = "check", required_unless_present = "all")]
    pub checks: Vec<String>,
    /// Run the whole suite at the chosen profile.
    #[arg(long, conflicts_with = "checks")]
    pub all: bool,
    /// Suite scale for --all: quick or desk.
    #[arg(long, default_value = "desk", value_parser = parse_profile)]
    pub profile: Profile,
    #[arg(long = "L")]
    pub l: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    pub anisotropy: Anisotropy,
    /// Interval length for polarized_interval.
    #[arg(long)]
    pub block: Option<usize>,
    /// Spectral parameter for epsilon_lambda.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON destination (standard output when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub force: bool,
    /// Checks run concurrently (0: all cores).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

pub fn run(a: &VerifyArgs) -> Result<ExitCode> {
    let plan: Vec<(String, CheckArgs)> = if a.all {
        suite(a.profile).into_iter().map(|(name, args)| (name.to_string(), args)).collect()
    } else {
        if let Some(bad) = a.checks.iter().find(|c| !CHECK_NAMES.contains(&c.as_str())) {
            bail!("unknown check '{bad}'; known checks: {}", CHECK_NAMES.join(", "));
        }
        let q = match (a.anisotropy.q, a.anisotropy.delta) {
            (None, None) => None,
            _ => Some(a.anisotropy.params()?.q),
        };
        let args = CheckArgs { l: a.l, n: a.n, q, block: a.block, lambda: a.lambda, seed: a.seed };
        a.checks.iter().map(|c| (c.clone(), args)).collect()
    };
    let results = pool(a.jobs)?.install(|| {
        plan.par_iter().map(|(name, args)| run_check(name, args)).collect::<Result<Vec<_>, _>>()
    })?;
    let reports: Vec<CheckReport> = results.into_iter().flatten().collect();
    for r in &reports {
        eprintln!("{r}");
    }
    let failed = reports.iter().filter(|r| !r.pass).count();
    eprintln!("{} of {} reports passed", reports.len() - failed, reports.len());
    let mut out = sink(a.out.as_deref(), a.force)?;
    serde_json::to_writer_pretty(&mut out, &reports)?;
    writeln!(out)?;
    out.flush()?;
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
