//! Weighted AoI over the `(P_A, P_B)` plane where both success
//! probabilities exceed one half.
//!
//! ```text
//! cargo run --release --example grid_surface
//! ```

use relay_aoi::experiment::scenario::GridSpec;
use relay_aoi::experiment::{grid, Scenario};
use relay_aoi::model::objective_f;

fn main() -> relay_aoi::Result<()> {
    let scenario = Scenario { grid: Some(GridSpec { step: 0.01 }), ..Scenario::default() };
    let surface = grid(&scenario)?;

    let best = surface.argmin.expect("feasible grid");
    println!(
        "{} feasible points; argmin ({}, {}) with AoI {:.4}",
        surface.rows.len(),
        best.p_a,
        best.p_b,
        best.weighted_aoi
    );
    // F_B is exactly 1/2 at the peak corner, so it sits on the edge of the surface.
    let p = scenario.params;
    let corner = objective_f(&p, p.peak_a, p.peak_b).value().expect("corner is feasible");
    println!("both sources at peak: AoI {:.4}", 0.5 + corner);
    Ok(())
}
