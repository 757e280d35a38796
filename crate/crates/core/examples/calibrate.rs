//! Re-measures the frozen band, gap and distance constants at q = 1/4.
//!
//! cargo run --release -p xxz-core --example calibrate

use xxz_core::verify::{calibrate_ring, calibrate_theorem2};

fn main() -> xxz_core::Result<()> {
    let ls = [8, 10, 12];
    let raw = calibrate_theorem2(&ls, 0.25, 0.0)?;
    let frozen = calibrate_theorem2(&ls, 0.25, 0.1)?;
    println!("open chain, measured: {raw:?}");
    println!("open chain, +10%:     {frozen:?}");
    let raw = calibrate_ring(&ls, 0.25, 0.0)?;
    let frozen = calibrate_ring(&ls, 0.25, 0.1)?;
    println!("ring, measured: {raw:?}");
    println!("ring, +10%:     {frozen:?}");
    Ok(())
}
