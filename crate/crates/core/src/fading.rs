//! Rayleigh block fading and Monte Carlo success probabilities.
//!
//! Channel power gains `|h|²` of a unit-variance circularly symmetric
//! complex Gaussian are `Exp(1)`; they are drawn by inversion, `-ln(U)`.
//!
//! Draws come from a single logical sequence per seed. The sequence is cut
//! into blocks of [`DRAWS_PER_BLOCK`] draws; block `k` is produced by
//! `ChaCha8Rng::seed_from_u64(seed)` on stream `k`. Estimators split work at
//! block boundaries, so counts do not depend on the number of rayon workers,
//! and the slot simulator consumes the same sequence round by round.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    instantaneous_snr, normalized_snrs, Destination, NormalizedSnrs, PowerProfile, SuccessKind,
    SuccessPair, SystemParams,
};

pub const DRAWS_PER_BLOCK: u64 = 1 << 16;

/// Normal quantile for a two-sided 95% interval.
pub const Z_95: f64 = 1.96;

/// One round's channel power gains.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelDraw {
    /// `|h_A|²`
    pub g_a: f64,
    /// `|h_B|²`
    pub g_b: f64,
}

impl ChannelDraw {
    fn gains_for(&self, dest: Destination) -> (f64, f64) {
        match dest {
            Destination::A => (self.g_a, self.g_b),
            Destination::B => (self.g_b, self.g_a),
        }
    }
}

fn unit_exponential<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // gen::<f64>() is in [0, 1); 1 - u is in (0, 1] so the log is finite.
    -(1.0 - rng.gen::<f64>()).ln()
}

/// Draws `|h_A|²` then `|h_B|²`, independent `Exp(1)`.
pub fn sample_channel_pair<R: Rng + ?Sized>(rng: &mut R) -> ChannelDraw {
    let g_a = unit_exponential(rng);
    let g_b = unit_exponential(rng);
    ChannelDraw { g_a, g_b }
}

pub(crate) fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// The infinite draw sequence for `seed`.
pub struct DrawStream {
    seed: u64,
    block: u64,
    used: u64,
    rng: ChaCha8Rng,
}

impl DrawStream {
    pub fn new(seed: u64) -> Self {
        DrawStream {
            seed,
            block: 0,
            used: 0,
            rng: block_rng(seed, 0),
        }
    }
}

impl Iterator for DrawStream {
    type Item = ChannelDraw;

    fn next(&mut self) -> Option<ChannelDraw> {
        if self.used == DRAWS_PER_BLOCK {
            self.block += 1;
            self.used = 0;
            self.rng = block_rng(self.seed, self.block);
        }
        self.used += 1;
        Some(sample_channel_pair(&mut self.rng))
    }
}

/// Monte Carlo estimate of one link's success probability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalSuccess {
    pub estimate: f64,
    pub n_samples: u64,
    pub ci_halfwidth: f64,
    pub seed: u64,
}

/// Normal-approximation 95% half-width of a binomial proportion.
pub fn ci_halfwidth_95(p: f64, n: u64) -> f64 {
    Z_95 * (p * (1.0 - p) / n as f64).sqrt()
}

fn succeeds(snrs: &NormalizedSnrs, draw: &ChannelDraw, dest: Destination, gamma_th: f64) -> bool {
    let (g_dest, g_src) = draw.gains_for(dest);
    instantaneous_snr(snrs, g_dest, g_src, dest) >= gamma_th
}

/// Success decision for both destinations under one draw, `[A, B]`.
pub(crate) struct RoundJudge {
    snrs: NormalizedSnrs,
    gamma_th: f64,
}

impl RoundJudge {
    pub(crate) fn new(params: &SystemParams, powers: &PowerProfile) -> Result<Self> {
        Ok(RoundJudge {
            snrs: normalized_snrs(params, powers)?,
            gamma_th: params.gamma_th,
        })
    }

    pub(crate) fn judge(&self, draw: &ChannelDraw) -> [bool; 2] {
        [
            succeeds(&self.snrs, draw, Destination::A, self.gamma_th),
            succeeds(&self.snrs, draw, Destination::B, self.gamma_th),
        ]
    }
}

/// Success counts `[A, B]` over the first `n` draws of `seed`'s sequence.
fn count_successes(judge: &RoundJudge, n: u64, seed: u64) -> [u64; 2] {
    let blocks = n.div_ceil(DRAWS_PER_BLOCK);
    (0..blocks)
        .into_par_iter()
        .map(|block| {
            let len = DRAWS_PER_BLOCK.min(n - block * DRAWS_PER_BLOCK);
            let mut rng = block_rng(seed, block);
            let mut counts = [0u64; 2];
            for _ in 0..len {
                let draw = sample_channel_pair(&mut rng);
                let [a, b] = judge.judge(&draw);
                counts[0] += a as u64;
                counts[1] += b as u64;
            }
            counts
        })
        .reduce(|| [0, 0], |x, y| [x[0] + y[0], x[1] + y[1]])
}

fn check_samples(n_samples: u64) -> Result<()> {
    if n_samples == 0 {
        return Err(Error::Precondition("n_samples must be >= 1".into()));
    }
    Ok(())
}

pub fn empirical_success_probability(
    params: &SystemParams,
    powers: &PowerProfile,
    dest: Destination,
    n_samples: u64,
    seed: u64,
) -> Result<EmpiricalSuccess> {
    check_samples(n_samples)?;
    let judge = RoundJudge::new(params, powers)?;
    let counts = count_successes(&judge, n_samples, seed);
    let hits = match dest {
        Destination::A => counts[0],
        Destination::B => counts[1],
    };
    let estimate = hits as f64 / n_samples as f64;
    Ok(EmpiricalSuccess {
        estimate,
        n_samples,
        ci_halfwidth: ci_halfwidth_95(estimate, n_samples),
        seed,
    })
}

/// Both directions evaluated on the same channel draws.
pub fn empirical_success_pair(
    params: &SystemParams,
    powers: &PowerProfile,
    n_samples: u64,
    seed: u64,
) -> Result<SuccessPair> {
    check_samples(n_samples)?;
    let judge = RoundJudge::new(params, powers)?;
    let [a, b] = count_successes(&judge, n_samples, seed);
    let n = n_samples as f64;
    let (f_a, f_b) = (a as f64 / n, b as f64 / n);
    Ok(SuccessPair {
        f_a,
        f_b,
        kind: SuccessKind::Empirical,
        ci_halfwidth_a: Some(ci_halfwidth_95(f_a, n_samples)),
        ci_halfwidth_b: Some(ci_halfwidth_95(f_b, n_samples)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_point() -> PowerProfile {
        PowerProfile::new(1.0, 1.196, 0.75).unwrap()
    }

    #[test]
    fn fixed_seed_reproduces_draws() {
        let a: Vec<_> = DrawStream::new(7).take(1000).collect();
        let b: Vec<_> = DrawStream::new(7).take(1000).collect();
        assert_eq!(a, b);
        let c: Vec<_> = DrawStream::new(8).take(1000).collect();
        assert_ne!(a, c);
    }

    #[test]
    fn stream_matches_block_layout() {
        let n = DRAWS_PER_BLOCK as usize + 10;
        let draws: Vec<_> = DrawStream::new(3).take(n).collect();
        let mut rng = block_rng(3, 1);
        assert_eq!(draws[DRAWS_PER_BLOCK as usize], sample_channel_pair(&mut rng));
        let mut rng = block_rng(3, 0);
        assert_eq!(draws[0], sample_channel_pair(&mut rng));
    }

    #[test]
    fn exponential_moments() {
        let n = 1_000_000;
        let (mut sum, mut tail, mut min) = (0.0, 0u64, f64::INFINITY);
        for d in DrawStream::new(11).take(n) {
            sum += d.g_a;
            tail += (d.g_a > 1.0) as u64;
            min = min.min(d.g_a.min(d.g_b));
        }
        let mean = sum / n as f64;
        let frac = tail as f64 / n as f64;
        assert!((0.99..=1.01).contains(&mean), "{mean}");
        assert!((frac - (-1f64).exp()).abs() < 0.002, "{frac}");
        assert!(min >= 0.0);
    }

    #[test]
    fn zero_threshold_always_succeeds() {
        let params = SystemParams { gamma_th: 0.0, ..SystemParams::default() };
        let e = empirical_success_probability(&params, &reference_point(), Destination::A, 10_000, 1).unwrap();
        assert_eq!(e.estimate, 1.0);
        assert_eq!(e.ci_halfwidth, 0.0);
        let pair = empirical_success_pair(&params, &reference_point(), 10_000, 1).unwrap();
        assert_eq!((pair.f_a, pair.f_b), (1.0, 1.0));
    }

    #[test]
    fn zero_samples_rejected() {
        let params = SystemParams::default();
        assert!(empirical_success_probability(&params, &reference_point(), Destination::A, 0, 1).is_err());
    }

    #[test]
    fn estimate_is_deterministic_and_ci_consistent() {
        let params = SystemParams::default();
        let a = empirical_success_probability(&params, &reference_point(), Destination::B, 200_000, 5).unwrap();
        let b = empirical_success_probability(&params, &reference_point(), Destination::B, 200_000, 5).unwrap();
        assert_eq!(a, b);
        let expect = 1.96 * (a.estimate * (1.0 - a.estimate) / 200_000.0).sqrt();
        assert!((a.ci_halfwidth - expect).abs() <= 1e-12 * expect);
        assert!((0.0..=1.0).contains(&a.estimate));
    }

    #[test]
    fn pair_agrees_with_single_direction() {
        let params = SystemParams::default();
        let pair = empirical_success_pair(&params, &reference_point(), 300_000, 9).unwrap();
        let a = empirical_success_probability(&params, &reference_point(), Destination::A, 300_000, 9).unwrap();
        let b = empirical_success_probability(&params, &reference_point(), Destination::B, 300_000, 9).unwrap();
        assert_eq!(pair.f_a, a.estimate);
        assert_eq!(pair.f_b, b.estimate);
        assert_eq!(pair.kind, SuccessKind::Empirical);
    }

    #[test]
    fn symmetric_setup_gives_matching_directions() {
        let params = SystemParams::default();
        let p = PowerProfile::new(1.0, 1.0, 0.75).unwrap();
        let pair = empirical_success_pair(&params, &p, 1_000_000, 21).unwrap();
        let combined = (pair.ci_halfwidth_a.unwrap().powi(2) + pair.ci_halfwidth_b.unwrap().powi(2)).sqrt();
        assert!((pair.f_a - pair.f_b).abs() < 3.0 * combined);
    }

    #[test]
    fn threshold_monotone_on_fixed_draws() {
        let p = reference_point();
        let mut prev = 1.0;
        for g in [0.0, 10.0, 50.0, 100.0, 200.0, 400.0] {
            let params = SystemParams { gamma_th: g, ..SystemParams::default() };
            let e = empirical_success_probability(&params, &p, Destination::A, 100_000, 4).unwrap();
            assert!(e.estimate <= prev);
            prev = e.estimate;
        }
    }

    #[test]
    fn more_power_dominates() {
        let params = SystemParams::default();
        let base = reference_point();
        let loud = PowerProfile::new(10.0, 11.96, 7.5).unwrap();
        for dest in [Destination::A, Destination::B] {
            let lo = empirical_success_probability(&params, &base, dest, 200_000, 13).unwrap();
            let hi = empirical_success_probability(&params, &loud, dest, 200_000, 13).unwrap();
            assert!(hi.estimate > lo.estimate);
        }
    }

    #[test]
    fn ci_shrinks_with_more_samples() {
        let params = SystemParams::default();
        let a = empirical_success_probability(&params, &reference_point(), Destination::A, 500_000, 2).unwrap();
        let b = empirical_success_probability(&params, &reference_point(), Destination::A, 1_000_000, 2).unwrap();
        let ratio = b.ci_halfwidth / a.ci_halfwidth;
        assert!((ratio - std::f64::consts::FRAC_1_SQRT_2).abs() < 0.01, "{ratio}");
    }
}
