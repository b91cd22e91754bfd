//! Resolve a JSON scenario with flag-style overrides, then run it.
//!
//! ```text
//! cargo run --example scenario_file
//! ```

use relay_aoi::experiment::{analyze, render, Format, Overrides, Scenario, ScenarioFile};

const SCENARIO: &str = r#"{
    "preset": "quick",
    "params": { "gamma_th_db": 20, "peak_a": 1, "peak_b": 2 },
    "powers": { "p_a": 1, "p_b": 1.196 },
    "simulation": { "seed": 42 }
}"#;

fn main() -> relay_aoi::Result<()> {
    let file = ScenarioFile::parse(SCENARIO)?;
    let overrides = Overrides { seed: Some(7), format: Some(Format::Json), ..Default::default() };
    let scenario = Scenario::resolve(&file, &overrides)?;
    println!("resolved: {}", serde_json::to_string(&scenario)?);
    print!("{}", render(&analyze(&scenario)?, scenario.output.format)?);
    Ok(())
}
