use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use xxz_core::states::{
    build_droplet, build_kink, droplet_overlap, droplet_overlap_closed, ring_droplet,
    ring_translation_overlap_closed, ring_translation_overlap_direct, DropletSpec, KinkSpec, RingDropletSpec,
};
use xxz_core::{Interval, Vector};

use crate::output::{csv_writer, fmt_f64};
use crate::{pool, Anisotropy};

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    Kink,
    Antikink,
    Droplet,
    Ring,
}

#[derive(Args, Debug)]
pub struct StateArgs {
    #[arg(long, value_enum)]
    pub kind: StateKind,
    #[arg(long = "L")]
    pub l: usize,
    #[arg(long)]
    pub n: usize,
    /// Droplet cut, or the ring shift (default: centred droplet, shift 0).
    #[arg(long)]
    pub x: Option<usize>,
    #[command(flatten)]
    pub anisotropy: Anisotropy,
    /// Scale to unit norm.
    #[arg(long)]
    pub normalize: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub force: bool,
}

pub fn run_state(a: &StateArgs) -> Result<ExitCode> {
    let q = a.anisotropy.params()?.q;
    let chain = Interval::chain(a.l)?;
    let v: Vector = match a.kind {
        StateKind::Kink => build_kink(&KinkSpec::kink(chain, a.n)?, q)?,
        StateKind::Antikink => build_kink(&KinkSpec::antikink(chain, a.n)?, q)?,
        StateKind::Droplet => {
            let (lo, hi) = DropletSpec::window(a.l, a.n.min(a.l));
            build_droplet(&DropletSpec::new(a.l, a.n, a.x.unwrap_or((a.l / 2).clamp(lo, hi)))?, q)?
        }
        StateKind::Ring => ring_droplet(&RingDropletSpec::new(a.l, a.n, a.x.unwrap_or(0))?, q)?,
    };
    let v = if a.normalize { v.normalized()? } else { v };
    let mut w = csv_writer(a.out.as_deref(), a.force)?;
    w.write_record(["index", "down_mask", "configuration", "amplitude"])?;
    for (i, (&mask, &amp)) in v.basis.masks().iter().zip(&v.amplitudes).enumerate() {
        let config = v.basis.unrank(i)?;
        w.write_record([i.to_string(), mask.to_string(), config.to_string(), fmt_f64(amp)])?;
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Normalised ⟨ξ(x), ξ(y)⟩ over every admissible pair.
    Droplet,
    /// ⟨ξ(0), T^x ξ(0)⟩/‖ξ(0)‖² on the ring for 0 ≤ x ≤ ⌊L/2⌋.
    Ring,
}

#[derive(Args, Debug)]
pub struct OverlapArgs {
    #[arg(long, value_enum, default_value = "droplet")]
    pub family: Family,
    #[arg(long = "L")]
    pub l: usize,
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub anisotropy: Anisotropy,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub force: bool,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

pub fn run_overlap(a: &OverlapArgs) -> Result<ExitCode> {
    let q = a.anisotropy.params()?.q;
    let (l, n) = (a.l, a.n);
    let mut w = csv_writer(a.out.as_deref(), a.force)?;
    match a.family {
        Family::Droplet => {
            let specs = DropletSpec::all(l, n)?;
            let pairs: Vec<(usize, usize)> =
                specs.iter().flat_map(|s| specs.iter().map(move |t| (s.x, t.x))).filter(|(x, y)| x <= y).collect();
            let rows = pool(a.jobs)?.install(|| {
                pairs
                    .par_iter()
                    .map(|&(x, y)| -> Result<[String; 5]> {
                        let direct = droplet_overlap(&DropletSpec::new(l, n, x)?, &DropletSpec::new(l, n, y)?, q)?;
                        let closed = droplet_overlap_closed(l, n, x, y, q)?;
                        Ok([
                            x.to_string(),
                            y.to_string(),
                            fmt_f64(closed),
                            fmt_f64(direct.normalized),
                            fmt_f64(direct.c_factor),
                        ])
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            w.write_record(["x", "y", "closed", "direct", "c_factor"])?;
            for r in rows {
                w.write_record(r)?;
            }
        }
        Family::Ring => {
            w.write_record(["x", "closed", "direct"])?;
            for x in 0..=l / 2 {
                let closed = ring_translation_overlap_closed(l, n, x, q)?;
                let direct = ring_translation_overlap_direct(l, n, x, q)?;
                w.write_record([x.to_string(), fmt_f64(closed), fmt_f64(direct)])?;
            }
        }
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}
