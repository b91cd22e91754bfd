//! Scenario resolution, the experiment commands and their CSV/JSON output.

pub mod commands;
pub mod output;
pub mod scenario;

pub use commands::{analyze, grid, optimize, simulate, sweep};
pub use output::{render, Artifact};
pub use scenario::{Format, Overrides, Preset, Scenario, ScenarioFile};
