//! The five experiment commands. Each returns a serialisable record; the
//! binary only parses flags, renders and writes.

use rayon::prelude::*;
use serde::Serialize;

use super::output::{fmt_opt, fmt_sig, Artifact};
use super::scenario::{Scenario, SweepAxis, SweepSpec};
use crate::error::{Error, Result};
use crate::fading::empirical_success_pair;
use crate::model::{
    asymptotic_success, objective_at, weighted_sum_aoi, AoiSummary, PowerProfile, SuccessPair,
    SystemParams,
};
use crate::optimizer::{
    grid_search_oracle, theorem1_optimize, Candidate, Direction, OptimizerOptions,
    OptimizerResult,
};
use crate::simulator::{
    interdeparture_consistency, run_simulation, ConsistencyReport, SimStats, SlotSimConfig,
    AOI_REL_TOLERANCE, MIN_CONSISTENCY_ROUNDS, QUICK_AOI_REL_TOLERANCE,
};

/// Default success floor for the `grid` command.
pub const GRID_MIN_SUCCESS: f64 = 0.5;

/// Slot count from which the tight renewal tolerance applies.
pub const FULL_LENGTH_SLOTS: u64 = 10_000_000;

/// SplitMix64 mix of `(seed, index)`; gives each sweep point its own stream.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn required_powers(scenario: &Scenario, command: &str) -> Result<PowerProfile> {
    scenario
        .powers
        .ok_or_else(|| Error::Config(format!("{command} needs fixed powers (p_a, p_b)")))
}

/// Weighted age from a pair, `None` when either probability is outside (0, 1].
fn summary(params: &SystemParams, pair: &SuccessPair) -> Option<AoiSummary> {
    weighted_sum_aoi(params, pair).ok()
}

// ---- analyze ----

#[derive(Clone, Debug, Serialize)]
pub struct AnalyzeRecord {
    pub powers: PowerProfile,
    pub asymptotic: SuccessPair,
    pub asymptotic_valid: bool,
    pub asymptotic_aoi: Option<AoiSummary>,
    pub empirical: SuccessPair,
    pub empirical_aoi: Option<AoiSummary>,
    pub n_samples: u64,
    pub seed: u64,
}

pub fn analyze(scenario: &Scenario) -> Result<AnalyzeRecord> {
    let params = &scenario.params;
    let powers = required_powers(scenario, "analyze")?;
    let sim = &scenario.simulation;
    let asymptotic = asymptotic_success(params, &powers)?;
    let empirical = empirical_success_pair(params, &powers, sim.n_samples, sim.seed)?;
    Ok(AnalyzeRecord {
        powers,
        asymptotic,
        asymptotic_valid: asymptotic.is_valid(),
        asymptotic_aoi: summary(params, &asymptotic),
        empirical,
        empirical_aoi: summary(params, &empirical),
        n_samples: sim.n_samples,
        seed: sim.seed,
    })
}

impl Artifact for AnalyzeRecord {
    fn header(&self) -> Vec<&'static str> {
        vec![
            "p_a", "p_b", "p_r", "asym_f_a", "asym_f_b", "asym_valid", "asym_aoi_a", "asym_aoi_b",
            "asym_weighted_aoi", "emp_f_a", "emp_ci_a", "emp_f_b", "emp_ci_b", "emp_aoi_a",
            "emp_aoi_b", "emp_weighted_aoi", "n_samples", "seed",
        ]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let a = self.asymptotic_aoi;
        let e = self.empirical_aoi;
        vec![vec![
            fmt_sig(self.powers.p_a),
            fmt_sig(self.powers.p_b),
            fmt_sig(self.powers.p_r),
            fmt_sig(self.asymptotic.f_a),
            fmt_sig(self.asymptotic.f_b),
            self.asymptotic_valid.to_string(),
            fmt_opt(a.map(|s| s.aoi_a)),
            fmt_opt(a.map(|s| s.aoi_b)),
            fmt_opt(a.map(|s| s.weighted)),
            fmt_sig(self.empirical.f_a),
            fmt_opt(self.empirical.ci_halfwidth_a),
            fmt_sig(self.empirical.f_b),
            fmt_opt(self.empirical.ci_halfwidth_b),
            fmt_opt(e.map(|s| s.aoi_a)),
            fmt_opt(e.map(|s| s.aoi_b)),
            fmt_opt(e.map(|s| s.weighted)),
            self.n_samples.to_string(),
            self.seed.to_string(),
        ]]
    }
}

// ---- optimize ----

#[derive(Clone, Debug, Serialize)]
pub struct OracleCheck {
    pub step: f64,
    pub grid: Candidate,
    pub gap_p_a: f64,
    pub gap_p_b: f64,
    pub gap_objective: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimizeRecord {
    pub min_success: f64,
    pub result: OptimizerResult,
    pub oracle: Option<OracleCheck>,
}

pub fn optimize(scenario: &Scenario) -> Result<OptimizeRecord> {
    let opts = OptimizerOptions {
        min_success: scenario.optimizer.min_success.unwrap_or(0.0),
    };
    let result = theorem1_optimize(&scenario.params, &opts)?;
    let oracle = match scenario.optimizer.oracle_step {
        Some(step) => {
            let grid = grid_search_oracle(&scenario.params, step, &opts)?;
            let g = grid.objective.value().unwrap_or(f64::INFINITY);
            Some(OracleCheck {
                step,
                grid,
                gap_p_a: (grid.p_a - result.p_a_star).abs(),
                gap_p_b: (grid.p_b - result.p_b_star).abs(),
                gap_objective: g - result.objective_star,
            })
        }
        None => None,
    };
    Ok(OptimizeRecord {
        min_success: opts.min_success,
        result,
        oracle,
    })
}

fn direction_label(d: Direction) -> &'static str {
    match d {
        Direction::SolveForB => "peak-a",
        Direction::SolveForA => "peak-b",
    }
}

impl Artifact for OptimizeRecord {
    fn header(&self) -> Vec<&'static str> {
        vec!["kind", "candidate", "p_a", "p_b", "p_r", "value", "weighted_aoi", "provenance", "note"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let r = &self.result;
        let p_r = fmt_sig(r.p_r_star);
        let winner = r.candidate(r.selected).expect("selected candidate exists");
        let note = if r.tie {
            "tie; candidate with P_A at peak kept".to_string()
        } else {
            String::new()
        };
        let mut rows = vec![vec![
            "optimum".into(),
            direction_label(r.selected).into(),
            fmt_sig(r.p_a_star),
            fmt_sig(r.p_b_star),
            p_r.clone(),
            fmt_sig(r.objective_star),
            fmt_sig(r.aoi_star),
            winner.provenance.as_str().into(),
            note,
        ]];
        for dir in [Direction::SolveForB, Direction::SolveForA] {
            let row = match r.candidate(dir) {
                Some(c) => vec![
                    "candidate".into(),
                    direction_label(dir).into(),
                    fmt_sig(c.p_a),
                    fmt_sig(c.p_b),
                    p_r.clone(),
                    fmt_opt(c.objective.value()),
                    fmt_opt(c.objective.value().map(|v| 0.5 + v)),
                    c.provenance.as_str().into(),
                    String::new(),
                ],
                None => vec![
                    "candidate".into(),
                    direction_label(dir).into(),
                    String::new(),
                    String::new(),
                    p_r.clone(),
                    super::output::INFEASIBLE.into(),
                    super::output::INFEASIBLE.into(),
                    String::new(),
                    "empty feasible interval".into(),
                ],
            };
            rows.push(row);
        }
        for c in &r.certificates {
            rows.push(vec![
                "certificate".into(),
                direction_label(c.direction).into(),
                fmt_sig(c.p_a),
                fmt_sig(c.p_b),
                p_r.clone(),
                fmt_sig(c.second_derivative),
                String::new(),
                String::new(),
                if c.positive { "convex" } else { "NOT convex" }.into(),
            ]);
        }
        if let Some(o) = &self.oracle {
            let v = o.grid.objective.value();
            rows.push(vec![
                "oracle".into(),
                String::new(),
                fmt_sig(o.grid.p_a),
                fmt_sig(o.grid.p_b),
                p_r,
                fmt_opt(v),
                fmt_opt(v.map(|v| 0.5 + v)),
                o.grid.provenance.as_str().into(),
                format!(
                    "step={} gap_p_a={} gap_p_b={} gap_objective={}",
                    fmt_sig(o.step),
                    fmt_sig(o.gap_p_a),
                    fmt_sig(o.gap_p_b),
                    fmt_sig(o.gap_objective)
                ),
            ]);
        }
        rows
    }
}

// ---- simulate ----

#[derive(Clone, Debug, Serialize)]
pub struct SimulateRecord {
    pub powers: PowerProfile,
    pub n_slots: u64,
    pub seed: u64,
    pub stats: SimStats,
    pub simulated_weighted_aoi: f64,
    /// Closed-form age at the run's own empirical success fractions.
    pub renewal_weighted_aoi: f64,
    /// Closed-form age at the high-SNR success probabilities.
    pub asymptotic_weighted_aoi: Option<f64>,
    /// `None` for runs shorter than the consistency minimum.
    pub consistency: Option<ConsistencyReport>,
}

pub fn simulate(scenario: &Scenario) -> Result<SimulateRecord> {
    let params = scenario.params;
    let powers = required_powers(scenario, "simulate")?;
    let sim = scenario.simulation;
    let stats = run_simulation(&SlotSimConfig {
        n_slots: sim.n_slots,
        seed: sim.seed,
        params,
        powers,
    })?;
    let tolerance = if sim.n_slots >= FULL_LENGTH_SLOTS {
        AOI_REL_TOLERANCE
    } else {
        QUICK_AOI_REL_TOLERANCE
    };
    let consistency = if stats.n_rounds >= MIN_CONSISTENCY_ROUNDS {
        Some(interdeparture_consistency(&stats, tolerance)?)
    } else {
        None
    };
    let asymptotic = asymptotic_success(&params, &powers)?;
    Ok(SimulateRecord {
        powers,
        n_slots: sim.n_slots,
        seed: sim.seed,
        simulated_weighted_aoi: stats.weighted_mean_aoi(&params),
        renewal_weighted_aoi: stats.renewal_weighted_aoi(&params),
        asymptotic_weighted_aoi: summary(&params, &asymptotic).map(|s| s.weighted),
        stats,
        consistency,
    })
}

impl Artifact for SimulateRecord {
    fn header(&self) -> Vec<&'static str> {
        vec![
            "p_a", "p_b", "p_r", "n_slots", "seed", "n_rounds", "sim_aoi_a", "emp_f_a",
            "mean_interdep_a", "second_moment_interdep_a", "sim_aoi_b", "emp_f_b",
            "mean_interdep_b", "second_moment_interdep_b", "sim_weighted_aoi",
            "renewal_weighted_aoi", "asym_weighted_aoi", "consistency",
        ]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let s = &self.stats;
        let verdict = match &self.consistency {
            Some(r) if r.passed() => "pass",
            Some(_) => "fail",
            None => "skipped",
        };
        vec![vec![
            fmt_sig(self.powers.p_a),
            fmt_sig(self.powers.p_b),
            fmt_sig(self.powers.p_r),
            self.n_slots.to_string(),
            self.seed.to_string(),
            s.n_rounds.to_string(),
            fmt_sig(s.a.mean_aoi),
            fmt_sig(s.a.empirical_f),
            fmt_sig(s.a.mean_interdep),
            fmt_sig(s.a.second_moment_interdep),
            fmt_sig(s.b.mean_aoi),
            fmt_sig(s.b.empirical_f),
            fmt_sig(s.b.mean_interdep),
            fmt_sig(s.b.second_moment_interdep),
            fmt_sig(self.simulated_weighted_aoi),
            fmt_sig(self.renewal_weighted_aoi),
            fmt_opt(self.asymptotic_weighted_aoi),
            verdict.into(),
        ]]
    }
}

// ---- sweep ----

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub p_a: f64,
    pub p_b: f64,
    pub asymptotic: SuccessPair,
    pub asymptotic_valid: bool,
    pub asymptotic_weighted_aoi: Option<f64>,
    pub empirical: SuccessPair,
    pub empirical_weighted_aoi: Option<f64>,
    pub simulated_weighted_aoi: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRecord {
    pub spec: SweepSpec,
    pub n_samples: u64,
    pub n_slots: u64,
    pub rows: Vec<SweepRow>,
}

pub fn sweep(scenario: &Scenario) -> Result<SweepRecord> {
    let spec = scenario.sweep.unwrap_or_default();
    spec.validate()?;
    let params = scenario.params;
    let sim = scenario.simulation;
    let points = spec.points();
    let rows = points
        .par_iter()
        .enumerate()
        .map(|(k, &x)| {
            let (p_a, p_b) = match spec.axis {
                SweepAxis::PB => (spec.fixed, x),
                SweepAxis::PA => (x, spec.fixed),
            };
            let powers = PowerProfile::new(p_a, p_b, params.peak_r)?;
            let seed = derive_seed(sim.seed, k as u64);
            let asymptotic = asymptotic_success(&params, &powers)?;
            let empirical = empirical_success_pair(&params, &powers, sim.n_samples, seed)?;
            let stats = run_simulation(&SlotSimConfig {
                n_slots: sim.n_slots,
                seed,
                params,
                powers,
            })?;
            Ok(SweepRow {
                p_a,
                p_b,
                asymptotic_valid: asymptotic.is_valid(),
                asymptotic_weighted_aoi: summary(&params, &asymptotic).map(|s| s.weighted),
                asymptotic,
                empirical_weighted_aoi: summary(&params, &empirical).map(|s| s.weighted),
                empirical,
                simulated_weighted_aoi: stats.weighted_mean_aoi(&params),
                seed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepRecord {
        spec,
        n_samples: sim.n_samples,
        n_slots: sim.n_slots,
        rows,
    })
}

impl Artifact for SweepRecord {
    fn preamble(&self) -> Vec<String> {
        vec![
            format!(
                "emp_* columns are Monte Carlo estimates over {} Rayleigh draws per point with 95% CI half-widths;",
                self.n_samples
            ),
            "they stand in for the exact success probability, which has no closed form here.".into(),
            format!(
                "sim_weighted_aoi is a slot-level simulation over {} slots per point.",
                self.n_slots
            ),
        ]
    }

    fn header(&self) -> Vec<&'static str> {
        vec![
            "p_a", "p_b", "asym_f_a", "asym_f_b", "asym_valid", "asym_weighted_aoi", "emp_f_a",
            "emp_ci_a", "emp_f_b", "emp_ci_b", "emp_weighted_aoi", "sim_weighted_aoi", "seed",
        ]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    fmt_sig(r.p_a),
                    fmt_sig(r.p_b),
                    fmt_sig(r.asymptotic.f_a),
                    fmt_sig(r.asymptotic.f_b),
                    r.asymptotic_valid.to_string(),
                    fmt_opt(r.asymptotic_weighted_aoi),
                    fmt_sig(r.empirical.f_a),
                    fmt_opt(r.empirical.ci_halfwidth_a),
                    fmt_sig(r.empirical.f_b),
                    fmt_opt(r.empirical.ci_halfwidth_b),
                    fmt_opt(r.empirical_weighted_aoi),
                    fmt_sig(r.simulated_weighted_aoi),
                    r.seed.to_string(),
                ]
            })
            .collect()
    }
}

// ---- grid ----

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GridRow {
    pub p_a: f64,
    pub p_b: f64,
    pub f_a: f64,
    pub f_b: f64,
    pub weighted_aoi: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GridRecord {
    pub step: f64,
    pub min_success: f64,
    pub rows: Vec<GridRow>,
    pub argmin: Option<GridRow>,
}

pub fn grid(scenario: &Scenario) -> Result<GridRecord> {
    let spec = scenario.grid.unwrap_or_default();
    let params = scenario.params;
    let min_success = scenario.optimizer.min_success.unwrap_or(GRID_MIN_SUCCESS);
    OptimizerOptions { min_success }.validate()?;
    let count = |peak: f64| (peak / spec.step + 1e-9).floor() as u64;
    let (na, nb) = (count(params.peak_a), count(params.peak_b));
    let rows: Vec<GridRow> = (1..=na)
        .into_par_iter()
        .flat_map_iter(|i| {
            let p_a = i as f64 * spec.step;
            (1..=nb).filter_map(move |j| {
                let p_b = j as f64 * spec.step;
                let v = objective_at(&params, p_a, p_b, params.peak_r, min_success).value()?;
                let pair = asymptotic_success(&params, &PowerProfile { p_a, p_b, p_r: params.peak_r }).ok()?;
                Some(GridRow {
                    p_a,
                    p_b,
                    f_a: pair.f_a,
                    f_b: pair.f_b,
                    weighted_aoi: 0.5 + v,
                })
            })
        })
        .collect();
    let argmin = rows
        .iter()
        .copied()
        .min_by(|x, y| x.weighted_aoi.total_cmp(&y.weighted_aoi));
    Ok(GridRecord {
        step: spec.step,
        min_success,
        rows,
        argmin,
    })
}

fn grid_row(kind: &str, r: &GridRow) -> Vec<String> {
    vec![
        kind.into(),
        fmt_sig(r.p_a),
        fmt_sig(r.p_b),
        fmt_sig(r.f_a),
        fmt_sig(r.f_b),
        fmt_sig(r.weighted_aoi),
    ]
}

impl Artifact for GridRecord {
    fn header(&self) -> Vec<&'static str> {
        vec!["kind", "p_a", "p_b", "f_a", "f_b", "weighted_aoi"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let mut out: Vec<_> = self.rows.iter().map(|r| grid_row("point", r)).collect();
        match &self.argmin {
            Some(r) => out.push(grid_row("argmin", r)),
            None => out.push(vec!["argmin".into(), String::new(), String::new(), String::new(), String::new(), "none".into()]),
        }
        out
    }
}
