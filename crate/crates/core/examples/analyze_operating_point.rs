//! Success probabilities and age of information at one operating point.
//!
//! ```text
//! cargo run --example analyze_operating_point
//! ```

use relay_aoi::fading::empirical_success_pair;
use relay_aoi::model::{asymptotic_success, normalized_snrs, weighted_sum_aoi};
use relay_aoi::{PowerProfile, SystemParams};

fn main() -> relay_aoi::Result<()> {
    let params = SystemParams::default();
    let powers = PowerProfile::new(1.0, 1.196, params.peak_r)?;

    let snrs = normalized_snrs(&params, &powers)?;
    println!("normalised SNRs: {snrs:?}");

    let asym = asymptotic_success(&params, &powers)?;
    let aoi = weighted_sum_aoi(&params, &asym)?;
    println!("high-SNR   F_A = {:.5}  F_B = {:.5}  weighted AoI = {:.4}", asym.f_a, asym.f_b, aoi.weighted);

    let emp = empirical_success_pair(&params, &powers, 1_000_000, 7)?;
    let aoi = weighted_sum_aoi(&params, &emp)?;
    println!(
        "Monte Carlo F_A = {:.5} ± {:.5}  F_B = {:.5} ± {:.5}  weighted AoI = {:.4}",
        emp.f_a,
        emp.ci_halfwidth_a.unwrap_or(0.0),
        emp.f_b,
        emp.ci_halfwidth_b.unwrap_or(0.0),
        aoi.weighted
    );

    // Far below the high-SNR regime the expansion stops being a probability.
    let low = asymptotic_success(&params, &PowerProfile::new(0.05, 0.05, params.peak_r)?)?;
    println!("at P_A = P_B = 0.05: F_A = {:.3}, valid = {}", low.f_a, low.is_valid());
    Ok(())
}
