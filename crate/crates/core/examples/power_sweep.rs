//! Weighted AoI as `P_B` sweeps with `P_A` fixed, written as CSV.
//!
//! ```text
//! cargo run --release --example power_sweep > sweep.csv
//! ```

use relay_aoi::experiment::scenario::{SweepAxis, SweepSpec};
use relay_aoi::experiment::{render, sweep, Format, Preset, Scenario};

fn main() -> relay_aoi::Result<()> {
    let mut scenario = Scenario::default();
    (scenario.simulation.n_slots, scenario.simulation.n_samples) = Preset::Quick.sizes();
    scenario.sweep = Some(SweepSpec { axis: SweepAxis::PB, fixed: 1.5, ..SweepSpec::default() });

    let record = sweep(&scenario)?;
    let best = record
        .rows
        .iter()
        .filter_map(|r| r.asymptotic_weighted_aoi.map(|v| (r.p_b, v)))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("some feasible point");
    eprintln!("lowest high-SNR AoI on the sweep: {:.4} at P_B = {}", best.1, best.0);
    print!("{}", render(&record, Format::Csv)?);
    Ok(())
}
