#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relay_aoi::optimizer::{feasible_interval, Direction, OptimizerOptions};
use relay_aoi::SystemParams;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// σ² ∈ [1e-4, 1e-2], γ_th ∈ [10, 300], peaks ∈ [0.5, 3], ω_A ∈ [0.2, 0.8].
pub fn random_params<R: Rng>(rng: &mut R) -> SystemParams {
    let weight_a = rng.gen_range(0.2..=0.8);
    SystemParams {
        sigma2_a: rng.gen_range(1e-4..=1e-2),
        sigma2_b: rng.gen_range(1e-4..=1e-2),
        sigma2_r: rng.gen_range(1e-4..=1e-2),
        gamma_th: rng.gen_range(10.0..=300.0),
        weight_a,
        weight_b: 1.0 - weight_a,
        peak_a: rng.gen_range(0.5..=3.0),
        peak_b: rng.gen_range(0.5..=3.0),
        peak_r: rng.gen_range(0.5..=3.0),
    }
}

/// A parameter set, a slice and a point strictly inside its feasible interval.
#[derive(Clone, Copy, Debug)]
pub struct SlicePoint {
    pub params: SystemParams,
    pub direction: Direction,
    pub fixed: f64,
    pub lower: f64,
    pub upper: f64,
    pub free: f64,
}

impl SlicePoint {
    pub fn p_a_p_b(&self) -> (f64, f64) {
        self.direction.point(self.fixed, self.free)
    }
}

/// Rejection-samples a slice with the fixed power in `(0, peak]` and the free
/// power drawn from the middle `inner` fraction of `(g, min(h, peak))`, so the
/// point satisfies both the success-probability and the peak constraints.
pub fn random_slice_point<R: Rng>(rng: &mut R, inner: f64) -> SlicePoint {
    loop {
        let params = random_params(rng);
        let direction = if rng.gen_bool(0.5) { Direction::SolveForB } else { Direction::SolveForA };
        let fixed = rng.gen_range(0.0..=1.0) * params.peak(direction.fixed());
        if fixed <= 0.0 {
            continue;
        }
        let Ok(iv) = feasible_interval(&params, fixed, direction, &OptimizerOptions::default()) else {
            continue;
        };
        let top = iv.upper.min(params.peak(direction.free()));
        if !iv.nonempty || top <= iv.lower {
            continue;
        }
        let margin = 0.5 * (1.0 - inner) * (top - iv.lower);
        let free = rng.gen_range(iv.lower + margin..=top - margin);
        return SlicePoint { params, direction, fixed, lower: iv.lower, upper: iv.upper, free };
    }
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}
