//! Monte Carlo success probabilities under Rayleigh fading compared with
//! the high-SNR expansion as the decoding threshold grows.
//!
//! ```text
//! cargo run --release --example fading_oracle
//! ```

use relay_aoi::fading::{empirical_success_probability, DrawStream};
use relay_aoi::model::asymptotic_success;
use relay_aoi::{Destination, PowerProfile, SystemParams};

fn main() -> relay_aoi::Result<()> {
    let draws: Vec<_> = DrawStream::new(3).take(3).collect();
    println!("first channel draws for seed 3: {draws:?}");

    let powers = PowerProfile::new(1.0, 1.196, 0.75)?;
    println!("{:>8} {:>10} {:>10} {:>10}", "gamma_dB", "asym F_A", "MC F_A", "CI 95%");
    for db in [0.0, 10.0, 15.0, 20.0, 23.0] {
        let params = SystemParams::default().with_gamma_th_db(db);
        let asym = asymptotic_success(&params, &powers)?;
        let mc = empirical_success_probability(&params, &powers, Destination::A, 1_000_000, 11)?;
        println!("{db:>8} {:>10.5} {:>10.5} {:>10.5}", asym.f_a, mc.estimate, mc.ci_halfwidth);
    }
    Ok(())
}
