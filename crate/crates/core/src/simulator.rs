//! Discrete-time age process of the two-slot exchange.
//!
//! Sources generate at will at the first slot of every round. Age is sampled
//! at the end of each slot: the first slot of a round adds one, the second
//! resets to 2 on success (the delivered update is two slots old) and adds
//! one otherwise. Both destinations start at age 2, as if a successful round
//! ended at `t = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fading::{DrawStream, RoundJudge};
use crate::model::{PowerProfile, SystemParams};

/// Age right after a successful round.
pub const RESET_AGE: u64 = 2;

/// Rounds required by [`interdeparture_consistency`].
pub const MIN_CONSISTENCY_ROUNDS: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlotSimConfig {
    pub n_slots: u64,
    pub seed: u64,
    pub params: SystemParams,
    pub powers: PowerProfile,
}

impl SlotSimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_slots < 2 || !self.n_slots.is_multiple_of(2) {
            return Err(Error::domain(format!(
                "n_slots must be an even number >= 2, got {}",
                self.n_slots
            )));
        }
        self.params.validate()?;
        self.powers.validate()
    }

    pub fn n_rounds(&self) -> u64 {
        self.n_slots / 2
    }
}

/// Age at one destination; `advance` plays one round.
#[derive(Clone, Copy, Debug)]
pub struct AgeProcess {
    age: u64,
}

impl Default for AgeProcess {
    fn default() -> Self {
        AgeProcess { age: RESET_AGE }
    }
}

impl AgeProcess {
    pub fn age(&self) -> u64 {
        self.age
    }

    /// Returns the ages at the end of the round's two slots.
    pub fn advance(&mut self, success: bool) -> [u64; 2] {
        let first = self.age + 1;
        self.age = if success { RESET_AGE } else { first + 1 };
        [first, self.age]
    }
}

/// Running time-average age and interdeparture moments for one destination.
#[derive(Clone, Debug, Default)]
pub struct RenewalAccumulator {
    process: AgeProcess,
    slots: u64,
    age_sum: u64,
    rounds: u64,
    successes: u64,
    since_delivery: u64,
    // Power sums of completed interdeparture times, T^1..T^4.
    t_sums: [f64; 4],
    intervals: u64,
}

impl RenewalAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record_round(&mut self, success: bool) {
        let [x, y] = self.process.advance(success);
        self.age_sum += x + y;
        self.slots += 2;
        self.rounds += 1;
        self.since_delivery += 2;
        if success {
            self.successes += 1;
            let t = self.since_delivery as f64;
            let mut p = 1.0;
            for s in self.t_sums.iter_mut() {
                p *= t;
                *s += p;
            }
            self.intervals += 1;
            self.since_delivery = 0;
        }
    }

    pub fn finish(&self) -> DestinationStats {
        let n = self.intervals as f64;
        let moment = |k: usize| {
            if self.intervals == 0 {
                f64::NAN
            } else {
                self.t_sums[k] / n
            }
        };
        let (m1, m2, m4) = (moment(0), moment(1), moment(3));
        DestinationStats {
            mean_aoi: self.age_sum as f64 / self.slots as f64,
            mean_interdep: m1,
            second_moment_interdep: m2,
            var_interdep: (m2 - m1 * m1).max(0.0),
            var_sq_interdep: (m4 - m2 * m2).max(0.0),
            n_intervals: self.intervals,
            successes: self.successes,
            empirical_f: self.successes as f64 / self.rounds as f64,
        }
    }
}

/// Statistics of one destination's simulated age process.
///
/// Interdeparture moments are over completed intervals only and are `NaN`
/// when no delivery happened.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DestinationStats {
    pub mean_aoi: f64,
    pub mean_interdep: f64,
    pub second_moment_interdep: f64,
    /// Sample variance of `T`.
    pub var_interdep: f64,
    /// Sample variance of `T²`.
    pub var_sq_interdep: f64,
    pub n_intervals: u64,
    pub successes: u64,
    pub empirical_f: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimStats {
    pub a: DestinationStats,
    pub b: DestinationStats,
    pub n_rounds: u64,
}

impl SimStats {
    /// `ω_A·Δ̄_A + ω_B·Δ̄_B` from the simulated time averages.
    pub fn weighted_mean_aoi(&self, params: &SystemParams) -> f64 {
        params.weight_a * self.a.mean_aoi + params.weight_b * self.b.mean_aoi
    }

    /// `1/2 + 2(ω_A/F̂_A + ω_B/F̂_B)` with this run's own success fractions.
    pub fn renewal_weighted_aoi(&self, params: &SystemParams) -> f64 {
        0.5 + 2.0 * (params.weight_a / self.a.empirical_f + params.weight_b / self.b.empirical_f)
    }
}

/// Plays `n_slots / 2` rounds; round `k` uses draw `k` of the seed's
/// [`DrawStream`].
pub fn run_simulation(config: &SlotSimConfig) -> Result<SimStats> {
    config.validate()?;
    let judge = RoundJudge::new(&config.params, &config.powers)?;
    let mut acc = [RenewalAccumulator::new(), RenewalAccumulator::new()];
    for draw in DrawStream::new(config.seed).take(config.n_rounds() as usize) {
        let [ok_a, ok_b] = judge.judge(&draw);
        acc[0].record_round(ok_a);
        acc[1].record_round(ok_b);
    }
    Ok(SimStats {
        a: acc[0].finish(),
        b: acc[1].finish(),
        n_rounds: config.n_rounds(),
    })
}

/// Per-slot ages `[A, B]` for the first `config.n_slots` slots.
pub fn aoi_trajectory(config: &SlotSimConfig) -> Result<Vec<[u64; 2]>> {
    config.validate()?;
    let judge = RoundJudge::new(&config.params, &config.powers)?;
    let mut proc = [AgeProcess::default(), AgeProcess::default()];
    let mut out = Vec::with_capacity(config.n_slots as usize);
    for draw in DrawStream::new(config.seed).take(config.n_rounds() as usize) {
        let [ok_a, ok_b] = judge.judge(&draw);
        let a = proc[0].advance(ok_a);
        let b = proc[1].advance(ok_b);
        out.push([a[0], b[0]]);
        out.push([a[1], b[1]]);
    }
    Ok(out)
}

/// Check of one destination's statistics against the geometric renewal model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DestinationConsistency {
    pub empirical_f: f64,
    pub mean_interdep: f64,
    pub expected_mean_interdep: f64,
    pub se_mean_interdep: f64,
    pub mean_ok: bool,
    pub second_moment_interdep: f64,
    pub expected_second_moment: f64,
    pub se_second_moment: f64,
    pub second_moment_ok: bool,
    pub mean_aoi: f64,
    pub expected_mean_aoi: f64,
    pub aoi_rel_error: f64,
    pub aoi_ok: bool,
}

impl DestinationConsistency {
    pub fn passed(&self) -> bool {
        self.mean_ok && self.second_moment_ok && self.aoi_ok
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub a: DestinationConsistency,
    pub b: DestinationConsistency,
    pub aoi_rel_tolerance: f64,
}

impl ConsistencyReport {
    pub fn passed(&self) -> bool {
        self.a.passed() && self.b.passed()
    }
}

/// Relative tolerance on the time-average age for full-length runs.
pub const AOI_REL_TOLERANCE: f64 = 0.005;
/// Relative tolerance used for short (10^5 slot) runs.
pub const QUICK_AOI_REL_TOLERANCE: f64 = 0.03;

fn check_destination(s: &DestinationStats, aoi_rel_tolerance: f64) -> DestinationConsistency {
    let f = s.empirical_f;
    let n = s.n_intervals as f64;
    let expected_mean = 2.0 / f;
    let expected_second = 4.0 * (2.0 - f) / (f * f);
    let se_mean = (s.var_interdep / n).sqrt();
    let se_second = (s.var_sq_interdep / n).sqrt();
    let expected_aoi = 0.5 + 2.0 / f;
    let rel = (s.mean_aoi - expected_aoi).abs() / s.mean_aoi;
    let has_data = s.n_intervals > 0 && f > 0.0;
    DestinationConsistency {
        empirical_f: f,
        mean_interdep: s.mean_interdep,
        expected_mean_interdep: expected_mean,
        se_mean_interdep: se_mean,
        mean_ok: has_data && (s.mean_interdep - expected_mean).abs() <= 3.0 * se_mean,
        second_moment_interdep: s.second_moment_interdep,
        expected_second_moment: expected_second,
        se_second_moment: se_second,
        second_moment_ok: has_data
            && (s.second_moment_interdep - expected_second).abs() <= 3.0 * se_second,
        mean_aoi: s.mean_aoi,
        expected_mean_aoi: expected_aoi,
        aoi_rel_error: rel,
        aoi_ok: has_data && rel <= aoi_rel_tolerance,
    }
}

/// Compares simulated interdeparture moments and mean age with the
/// geometric model evaluated at the run's own success fractions.
pub fn interdeparture_consistency(stats: &SimStats, aoi_rel_tolerance: f64) -> Result<ConsistencyReport> {
    if stats.n_rounds < MIN_CONSISTENCY_ROUNDS {
        return Err(Error::Precondition(format!(
            "need at least {MIN_CONSISTENCY_ROUNDS} rounds, got {}",
            stats.n_rounds
        )));
    }
    Ok(ConsistencyReport {
        a: check_destination(&stats.a, aoi_rel_tolerance),
        b: check_destination(&stats.b, aoi_rel_tolerance),
        aoi_rel_tolerance,
    })
}
