//! Derivative-free searches: golden section on a bracket and an exhaustive
//! grid used as a brute-force reference.

use std::cmp::Ordering;

use rayon::prelude::*;

use super::{Candidate, OptimizerOptions, Provenance};
use crate::error::{Error, Result};
use crate::model::{objective_at, Objective, SystemParams};

/// 1/φ
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GoldenResult {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

/// Minimises a unimodal `f` on `[lo, hi]`. The endpoints are compared with
/// the final midpoint so that a monotone function returns the boundary.
pub fn golden_section<F>(f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> GoldenResult
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut iterations = 0;
    while b - a > tol && iterations < max_iter {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iterations += 1;
    }
    let mid = 0.5 * (a + b);
    let mut best = GoldenResult { x: mid, fx: f(mid), iterations };
    for x in [lo, hi] {
        let fx = f(x);
        if fx < best.fx {
            best = GoldenResult { x, fx, iterations };
        }
    }
    best
}

fn grid_len(peak: f64, step: f64) -> u64 {
    (peak / step + 1e-9).floor() as u64
}

/// Total order used by the grid: objective, then smaller `P_A`, then smaller `P_B`.
fn grid_order(x: &(f64, f64, f64), y: &(f64, f64, f64)) -> Ordering {
    x.2.total_cmp(&y.2)
        .then(x.0.total_cmp(&y.0))
        .then(x.1.total_cmp(&y.1))
}

/// Exhaustive search of `{step, 2·step, …} ≤ peak` in both source powers with
/// the relay at its peak. Rows are evaluated in parallel; the reduction is
/// a total order so the answer does not depend on scheduling.
pub fn grid_search_oracle(params: &SystemParams, step: f64, opts: &OptimizerOptions) -> Result<Candidate> {
    params.validate()?;
    opts.validate()?;
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::domain(format!("grid step must be > 0, got {step}")));
    }
    let na = grid_len(params.peak_a, step);
    let nb = grid_len(params.peak_b, step);
    let best = (1..=na)
        .into_par_iter()
        .filter_map(|i| {
            let p_a = i as f64 * step;
            (1..=nb)
                .filter_map(|j| {
                    let p_b = j as f64 * step;
                    objective_at(params, p_a, p_b, params.peak_r, opts.min_success)
                        .value()
                        .map(|v| (p_a, p_b, v))
                })
                .min_by(grid_order)
        })
        .min_by(grid_order);
    match best {
        Some((p_a, p_b, v)) => Ok(Candidate {
            p_a,
            p_b,
            objective: Objective::Feasible(v),
            provenance: Provenance::GridSearch,
        }),
        None => Err(Error::infeasible(
            format!("no feasible point on the {step} grid below the peaks"),
            vec![],
        )),
    }
}
