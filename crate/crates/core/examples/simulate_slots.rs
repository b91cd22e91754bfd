//! Slot-level age process: a short trajectory, then a long run checked
//! against the renewal formula at its own empirical success rates.
//!
//! ```text
//! cargo run --release --example simulate_slots
//! ```

use relay_aoi::simulator::{
    aoi_trajectory, interdeparture_consistency, run_simulation, SlotSimConfig, AOI_REL_TOLERANCE,
};
use relay_aoi::{PowerProfile, SystemParams};

fn main() -> relay_aoi::Result<()> {
    let params = SystemParams::default();
    let powers = PowerProfile::new(1.0, 1.196, params.peak_r)?;

    let short = SlotSimConfig { n_slots: 16, seed: 5, params, powers };
    let ages: Vec<_> = aoi_trajectory(&short)?.iter().map(|a| a[0]).collect();
    println!("AoI at A over 16 slots: {ages:?}");

    let long = SlotSimConfig { n_slots: 10_000_000, ..short };
    let stats = run_simulation(&long)?;
    println!(
        "10^7 slots: mean AoI A = {:.4}, B = {:.4}, weighted = {:.4}",
        stats.a.mean_aoi,
        stats.b.mean_aoi,
        stats.weighted_mean_aoi(&params)
    );
    println!(
        "renewal prediction from the run's own F: {:.4}",
        stats.renewal_weighted_aoi(&params)
    );
    let report = interdeparture_consistency(&stats, AOI_REL_TOLERANCE)?;
    println!("inter-departure consistency: {}", if report.passed() { "pass" } else { "fail" });
    Ok(())
}
