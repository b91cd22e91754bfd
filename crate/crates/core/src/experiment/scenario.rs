//! Scenario files and their resolution against presets and flag overrides.
//!
//! Resolution order: built-in defaults, then the JSON file, then the named
//! preset (simulation sizes only), then individual flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{db_to_linear, PowerProfile, SystemParams};

/// Directory used for artifacts when no explicit output path is given.
pub const OUT_DIR_ENV: &str = "RELAY_AOI_OUT_DIR";

pub const DEFAULT_SEED: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Named simulation sizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// 10^7 slots and 10^7 Monte Carlo samples per point.
    Full,
    /// 10^5 slots and 10^5 samples, for CI.
    Quick,
}

impl Preset {
    pub fn sizes(self) -> (u64, u64) {
        match self {
            Preset::Full => (10_000_000, 10_000_000),
            Preset::Quick => (100_000, 100_000),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Sweep `P_B` with `P_A` fixed.
    PB,
    /// Sweep `P_A` with `P_B` fixed.
    PA,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    /// Power of the source that is not swept.
    pub fixed: f64,
    pub lower: f64,
    pub upper: f64,
    pub step: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            axis: SweepAxis::PB,
            fixed: 1.0,
            lower: 0.75,
            upper: 2.0,
            step: 0.025,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::Config(format!("sweep step must be > 0, got {}", self.step)));
        }
        if !(self.lower > 0.0 && self.lower < self.upper && self.upper.is_finite()) {
            return Err(Error::Config(format!(
                "sweep needs 0 < lower < upper, got [{}, {}]",
                self.lower, self.upper
            )));
        }
        if !(self.fixed.is_finite() && self.fixed > 0.0) {
            return Err(Error::Config(format!("sweep fixed power must be > 0, got {}", self.fixed)));
        }
        Ok(())
    }

    /// `lower + k·step` for every `k` that stays within `upper`.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.upper - self.lower) / self.step + 1e-9).floor() as u64;
        (0..=n).map(|k| self.lower + k as f64 * self.step).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub step: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { step: 0.01 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationSettings {
    pub n_slots: u64,
    pub n_samples: u64,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSettings {
    /// Floor on both success probabilities; commands pick their own default
    /// when unset.
    pub min_success: Option<f64>,
    pub oracle_step: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputSettings {
    pub path: Option<PathBuf>,
    pub format: Format,
}

/// A fully resolved scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub params: SystemParams,
    pub powers: Option<PowerProfile>,
    pub sweep: Option<SweepSpec>,
    pub grid: Option<GridSpec>,
    pub simulation: SimulationSettings,
    pub optimizer: OptimizerSettings,
    pub output: OutputSettings,
}

impl Default for Scenario {
    fn default() -> Self {
        let (n_slots, n_samples) = Preset::Full.sizes();
        Scenario {
            params: SystemParams::default(),
            powers: None,
            sweep: None,
            grid: None,
            simulation: SimulationSettings {
                n_slots,
                n_samples,
                seed: DEFAULT_SEED,
            },
            optimizer: OptimizerSettings::default(),
            output: OutputSettings {
                path: None,
                format: Format::Csv,
            },
        }
    }
}

// ---- file schema ----

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub sigma2_a: Option<f64>,
    pub sigma2_b: Option<f64>,
    pub sigma2_r: Option<f64>,
    /// Linear threshold.
    pub gamma_th: Option<f64>,
    pub gamma_th_db: Option<f64>,
    pub weight_a: Option<f64>,
    pub weight_b: Option<f64>,
    pub peak_a: Option<f64>,
    pub peak_b: Option<f64>,
    /// Defaults to `0.75 · peak_a`.
    pub peak_r: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowersFile {
    pub p_a: f64,
    pub p_b: f64,
    /// Defaults to the relay peak.
    pub p_r: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationFile {
    pub n_slots: Option<u64>,
    pub n_samples: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerFile {
    pub min_success: Option<f64>,
    pub oracle_step: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputFile {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

/// On-disk scenario. Every field is optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub preset: Option<Preset>,
    #[serde(default)]
    pub params: ParamsFile,
    pub powers: Option<PowersFile>,
    pub sweep: Option<SweepSpec>,
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub simulation: SimulationFile,
    #[serde(default)]
    pub optimizer: OptimizerFile,
    #[serde(default)]
    pub output: OutputFile,
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid scenario: {e}")))
    }
}

/// Command-line overrides applied after the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub preset: Option<Preset>,
    pub seed: Option<u64>,
    pub n_slots: Option<u64>,
    pub n_samples: Option<u64>,
    pub oracle_step: Option<f64>,
    pub min_success: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub gamma_th_db: Option<f64>,
    pub p_a: Option<f64>,
    pub p_b: Option<f64>,
    pub p_r: Option<f64>,
}

fn resolve_params(file: &ParamsFile, gamma_db_flag: Option<f64>) -> Result<SystemParams> {
    let d = SystemParams::default();
    let peak_a = file.peak_a.unwrap_or(d.peak_a);
    let gamma_th = match (file.gamma_th, file.gamma_th_db) {
        (Some(_), Some(_)) => {
            return Err(Error::Config("give gamma_th or gamma_th_db, not both".into()));
        }
        (Some(g), None) => g,
        (None, Some(db)) => db_to_linear(db),
        (None, None) => d.gamma_th,
    };
    let weight_a = file.weight_a.unwrap_or(d.weight_a);
    let params = SystemParams {
        sigma2_a: file.sigma2_a.unwrap_or(d.sigma2_a),
        sigma2_b: file.sigma2_b.unwrap_or(d.sigma2_b),
        sigma2_r: file.sigma2_r.unwrap_or(d.sigma2_r),
        gamma_th: gamma_db_flag.map(db_to_linear).unwrap_or(gamma_th),
        weight_a,
        weight_b: file.weight_b.unwrap_or(1.0 - weight_a),
        peak_a,
        peak_b: file.peak_b.unwrap_or(d.peak_b),
        peak_r: file.peak_r.unwrap_or(0.75 * peak_a),
    };
    params.validate().map_err(|e| Error::Config(e.to_string()))?;
    Ok(params)
}

impl Scenario {
    pub fn resolve(file: &ScenarioFile, o: &Overrides) -> Result<Scenario> {
        let mut s = Scenario {
            params: resolve_params(&file.params, o.gamma_th_db)?,
            ..Scenario::default()
        };

        if let Some(p) = &file.powers {
            s.powers = Some(PowerProfile {
                p_a: p.p_a,
                p_b: p.p_b,
                p_r: p.p_r.unwrap_or(s.params.peak_r),
            });
        }
        if o.p_a.is_some() || o.p_b.is_some() || o.p_r.is_some() {
            let base = s.powers;
            let pick = |flag: Option<f64>, from: Option<f64>, name: &str| {
                flag.or(from)
                    .ok_or_else(|| Error::Config(format!("fixed powers need {name}")))
            };
            s.powers = Some(PowerProfile {
                p_a: pick(o.p_a, base.map(|b| b.p_a), "p_a")?,
                p_b: pick(o.p_b, base.map(|b| b.p_b), "p_b")?,
                p_r: o.p_r.or(base.map(|b| b.p_r)).unwrap_or(s.params.peak_r),
            });
        }
        s.sweep = file.sweep;
        s.grid = file.grid;

        if let Some(preset) = file.preset {
            (s.simulation.n_slots, s.simulation.n_samples) = preset.sizes();
        }
        let sim = &file.simulation;
        s.simulation.n_slots = sim.n_slots.unwrap_or(s.simulation.n_slots);
        s.simulation.n_samples = sim.n_samples.unwrap_or(s.simulation.n_samples);
        s.simulation.seed = sim.seed.unwrap_or(s.simulation.seed);
        if let Some(preset) = o.preset {
            (s.simulation.n_slots, s.simulation.n_samples) = preset.sizes();
        }
        s.simulation.n_slots = o.n_slots.unwrap_or(s.simulation.n_slots);
        s.simulation.n_samples = o.n_samples.unwrap_or(s.simulation.n_samples);
        s.simulation.seed = o.seed.unwrap_or(s.simulation.seed);

        s.optimizer = OptimizerSettings {
            min_success: o.min_success.or(file.optimizer.min_success),
            oracle_step: o.oracle_step.or(file.optimizer.oracle_step),
        };
        s.output = OutputSettings {
            path: o.out.clone().or_else(|| file.output.path.clone()),
            format: o.format.or(file.output.format).unwrap_or(Format::Csv),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate().map_err(|e| Error::Config(e.to_string()))?;
        let given = [self.powers.is_some(), self.sweep.is_some(), self.grid.is_some()];
        if given.iter().filter(|&&g| g).count() > 1 {
            return Err(Error::Config(
                "specify at most one of fixed powers, a sweep, or a grid".into(),
            ));
        }
        if let Some(p) = &self.powers {
            p.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        if let Some(sw) = &self.sweep {
            sw.validate()?;
        }
        if let Some(g) = &self.grid {
            if !(g.step.is_finite() && g.step > 0.0) {
                return Err(Error::Config(format!("grid step must be > 0, got {}", g.step)));
            }
        }
        let sim = &self.simulation;
        if sim.n_slots < 2 || !sim.n_slots.is_multiple_of(2) {
            return Err(Error::Config(format!("n_slots must be even and >= 2, got {}", sim.n_slots)));
        }
        if sim.n_samples == 0 {
            return Err(Error::Config("n_samples must be >= 1".into()));
        }
        if let Some(m) = self.optimizer.min_success {
            if !(0.0..1.0).contains(&m) {
                return Err(Error::Config(format!("min_success must lie in [0, 1), got {m}")));
            }
        }
        if let Some(step) = self.optimizer.oracle_step {
            if !(step.is_finite() && step > 0.0) {
                return Err(Error::Config(format!("oracle step must be > 0, got {step}")));
            }
        }
        Ok(())
    }

    /// Explicit path, else `$RELAY_AOI_OUT_DIR/<command>.<ext>`, else `None`
    /// (standard output).
    pub fn output_path(&self, command: &str, env_dir: Option<&Path>) -> Option<PathBuf> {
        if let Some(p) = &self.output.path {
            return Some(p.clone());
        }
        env_dir.map(|d| d.join(format!("{command}.{}", self.output.format.extension())))
    }
}
