//! Optimal source powers, the two boundary candidates and their
//! convexity certificates, checked against a brute-force grid.
//!
//! ```text
//! cargo run --example optimize_powers
//! ```

use relay_aoi::optimizer::{
    conditional_optimum, feasible_interval, grid_search_oracle, lemma_coefficients,
    theorem1_optimize, Direction, OptimizerOptions,
};
use relay_aoi::SystemParams;

fn main() -> relay_aoi::Result<()> {
    let params = SystemParams::default();
    let opts = OptimizerOptions::default();

    for p_a in [1.0, 1.5] {
        let iv = feasible_interval(&params, p_a, Direction::SolveForB, &opts)?;
        let c = lemma_coefficients(&params, p_a, Direction::SolveForB)?;
        let best = conditional_optimum(&params, p_a, Direction::SolveForB, &opts)?;
        println!(
            "P_A = {p_a}: feasible P_B in ({:.4}, {:.4}), root {:.4}, rejected root {:.4}, chosen {:.4} via {}",
            iv.lower,
            iv.upper,
            c.interior_root(),
            c.rejected_root(),
            best.p_b,
            best.provenance.as_str()
        );
    }

    let r = theorem1_optimize(&params, &opts)?;
    println!(
        "optimum: P_A = {}, P_B = {:.4}, P_r = {}, weighted AoI = {:.4}",
        r.p_a_star, r.p_b_star, r.p_r_star, r.aoi_star
    );
    for cert in &r.certificates {
        println!("  {:?} slice curvature {:.4}", cert.direction, cert.second_derivative);
    }

    let grid = grid_search_oracle(&params, 1e-3, &opts)?;
    println!(
        "grid (step 1e-3): ({}, {}), objective gap {:.2e}",
        grid.p_a,
        grid.p_b,
        grid.objective.value().unwrap() - r.objective_star
    );

    // A success floor shrinks the feasible set; the optimizer then searches numerically.
    let floor = OptimizerOptions { min_success: 0.62 };
    let r = theorem1_optimize(&params, &floor)?;
    println!("with both F > 0.62: P_B = {:.4}, AoI = {:.4}", r.p_b_star, r.aoi_star);
    Ok(())
}
