//! One-dimensional slices of the objective with one source power held fixed.
//!
//! Every formula is written once, for "fixed node x, free node y". Solving
//! for `P_B` at fixed `P_A` uses `x = A, y = B`; the other direction is the
//! exact label mirror.

use log::warn;
use serde::{Deserialize, Serialize};

use super::search::golden_section;
use super::{Candidate, Direction, OptimizerOptions, Provenance};
use crate::error::{Error, Result};
use crate::model::{asymptotic_link, objective_at, Objective, SystemParams};

/// Relative size below which `κ` is treated as zero.
pub const KAPPA_DEGENERACY: f64 = 1e-9;

pub const FALLBACK_TOL: f64 = 1e-10;
pub const FALLBACK_MAX_ITER: usize = 200;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Slice {
    pub direction: Direction,
    pub gamma: f64,
    pub s2_r: f64,
    pub s2_fixed: f64,
    pub s2_free: f64,
    pub w_fixed: f64,
    pub w_free: f64,
    pub p_r: f64,
    pub p_fixed: f64,
    pub peak_free: f64,
}

impl Slice {
    pub fn new(params: &SystemParams, fixed_power: f64, direction: Direction) -> Result<Self> {
        params.validate()?;
        if params.gamma_th <= 0.0 {
            return Err(Error::domain("power allocation needs gamma_th > 0"));
        }
        if !(fixed_power.is_finite() && fixed_power > 0.0) {
            return Err(Error::domain(format!("fixed power must be > 0, got {fixed_power}")));
        }
        let (x, y) = (direction.fixed(), direction.free());
        Ok(Slice {
            direction,
            gamma: params.gamma_th,
            s2_r: params.sigma2_r,
            s2_fixed: params.noise(x),
            s2_free: params.noise(y),
            w_fixed: params.weight(x),
            w_free: params.weight(y),
            p_r: params.peak_r,
            p_fixed: fixed_power,
            peak_free: params.peak(y),
        })
    }

    /// Success probability at the fixed node (improves with the free power).
    pub fn f_at_fixed(&self, p_free: f64) -> f64 {
        asymptotic_link(self.gamma, self.s2_r, self.s2_fixed, self.p_fixed, p_free, self.p_r)
    }

    /// Success probability at the free node (degrades with the free power).
    pub fn f_at_free(&self, p_free: f64) -> f64 {
        asymptotic_link(self.gamma, self.s2_r, self.s2_free, p_free, self.p_fixed, self.p_r)
    }

    pub fn objective(&self, params: &SystemParams, p_free: f64, min_success: f64) -> Objective {
        let (p_a, p_b) = self.direction.point(self.p_fixed, p_free);
        objective_at(params, p_a, p_b, params.peak_r, min_success)
    }
}

/// Open range of the free power on which both success probabilities lie in
/// `(min_success, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibleInterval {
    pub direction: Direction,
    pub fixed_power: f64,
    pub lower: f64,
    pub upper: f64,
    pub nonempty: bool,
}

impl FeasibleInterval {
    pub fn contains(&self, p: f64) -> bool {
        p > self.lower && p < self.upper
    }
}

pub fn feasible_interval(
    params: &SystemParams,
    fixed_power: f64,
    direction: Direction,
    opts: &OptimizerOptions,
) -> Result<FeasibleInterval> {
    opts.validate()?;
    let s = Slice::new(params, fixed_power, direction)?;
    let Slice { gamma, s2_r, s2_fixed, s2_free, p_r, p_fixed, .. } = s;
    let denom = p_r - gamma * s2_fixed;
    if denom <= 0.0 {
        return Err(Error::infeasible(
            format!(
                "relay peak {p_r} <= gamma_th * noise {}: success at the {:?} side can never be positive",
                gamma * s2_fixed,
                direction.fixed()
            ),
            vec![],
        ));
    }
    let (lower, upper) = if opts.min_success == 0.0 {
        (
            gamma * (p_r * s2_r + p_fixed * s2_fixed) / denom,
            (p_fixed * p_r - gamma * (p_fixed * s2_free + p_r * s2_r)) / (gamma * s2_free),
        )
    } else {
        // F_x = a - c / p  and  F_y = d - e p
        let m = opts.min_success;
        let a = 1.0 - gamma * s2_fixed / p_r;
        let c = gamma * (s2_r + s2_fixed * p_fixed / p_r);
        let d = 1.0 - gamma * s2_r / p_fixed - gamma * s2_free / p_r;
        let e = gamma * s2_free / (p_r * p_fixed);
        let lower = if a > m { c / (a - m) } else { f64::INFINITY };
        (lower, (d - m) / e)
    };
    Ok(FeasibleInterval {
        direction,
        fixed_power,
        lower,
        upper,
        nonempty: lower < upper,
    })
}

/// Coefficients of the stationary points `(±βθ + φ)/κ` of a slice.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaCoefficients {
    pub beta: f64,
    pub theta: f64,
    pub phi: f64,
    pub kappa: f64,
    /// `|κ₁| + |κ₂|`, the magnitudes of the two terms summed into `κ`.
    pub kappa_scale: f64,
}

impl LemmaCoefficients {
    /// The stationary point inside the feasible interval.
    pub fn interior_root(&self) -> f64 {
        (self.beta * self.theta + self.phi) / self.kappa
    }

    /// The stationary point with `θ` negated; never feasible.
    pub fn rejected_root(&self) -> f64 {
        (-self.beta * self.theta + self.phi) / self.kappa
    }

    pub fn kappa_is_degenerate(&self) -> bool {
        self.kappa.abs() <= KAPPA_DEGENERACY * self.kappa_scale
    }
}

pub fn lemma_coefficients(
    params: &SystemParams,
    fixed_power: f64,
    direction: Direction,
) -> Result<LemmaCoefficients> {
    let s = Slice::new(params, fixed_power, direction)?;
    let Slice { gamma: g, s2_r, s2_fixed: sx2, s2_free: sy2, w_fixed: wx, w_free: wy, p_r: pr, p_fixed: px, .. } = s;
    let sy = sy2.sqrt();
    let g2 = g * g;
    let load = px * sx2 + pr * s2_r;

    let beta = pr * (px * wx * wy * load).sqrt();
    let theta = px * g * (sx2 + sy2) + g2 * s2_r * (sy2 - sx2) + pr * g * s2_r - px * pr;
    let phi = px * pr * g * sy * (wx - wy) * (load - g * sx2 * s2_r)
        + g2 * sy * (wy * px * px * sx2 * sx2 - wx * s2_r * s2_r * pr * pr - wx * px * sy2 * load);
    let k1 = wy * px * sy * (2.0 * pr * g * sx2 - pr * pr - g2 * sx2 * sx2);
    let k2 = wx * g2 * sy * sy2 * load;
    Ok(LemmaCoefficients {
        beta,
        theta,
        phi,
        kappa: k1 + k2,
        kappa_scale: k1.abs() + k2.abs(),
    })
}

/// Closed-form second derivative of the objective along the slice through
/// `(p_a, p_b)` in `direction`.
pub fn second_derivative_slice(
    params: &SystemParams,
    p_a: f64,
    p_b: f64,
    direction: Direction,
) -> Result<f64> {
    let (fixed, free) = direction.split(p_a, p_b);
    let s = Slice::new(params, fixed, direction)?;
    if !(free.is_finite() && free > 0.0) {
        return Err(Error::domain(format!("free power must be > 0, got {free}")));
    }
    let fx = s.f_at_fixed(free);
    let fy = s.f_at_free(free);
    if !(fx > 0.0 && fx < 1.0 && fy > 0.0 && fy < 1.0) {
        return Err(Error::domain(format!(
            "({p_a}, {p_b}) is outside the feasible region: F = ({fx}, {fy})"
        )));
    }
    let Slice { gamma: g, s2_r, s2_fixed: sx2, s2_free: sy2, w_fixed: wx, w_free: wy, p_r: pr, p_fixed: px, .. } = s;
    let t1 = 4.0 * wx * g * (px * sx2 + pr * s2_r) * (pr - g * sx2)
        / (free.powi(3) * pr * pr * fx.powi(3));
    let t2 = 4.0 * wy * g * g * sy2 * sy2 / (px * px * pr * pr * fy.powi(3));
    Ok(t1 + t2)
}

/// The discarded stationary point of the slice.
pub fn rejected_root(params: &SystemParams, fixed_power: f64, direction: Direction) -> Result<f64> {
    let interval = feasible_interval(params, fixed_power, direction, &OptimizerOptions::default())?;
    if !interval.nonempty {
        return Err(Error::infeasible("empty feasible interval", vec![interval]));
    }
    Ok(lemma_coefficients(params, fixed_power, direction)?.rejected_root())
}

fn usable_interval(
    params: &SystemParams,
    fixed_power: f64,
    direction: Direction,
    opts: &OptimizerOptions,
) -> Result<(Slice, FeasibleInterval)> {
    let interval = feasible_interval(params, fixed_power, direction, opts)?;
    let s = Slice::new(params, fixed_power, direction)?;
    if !interval.nonempty {
        return Err(Error::infeasible(
            format!("empty feasible interval for {:?} at fixed power {fixed_power}", direction),
            vec![interval],
        ));
    }
    if s.peak_free <= interval.lower {
        return Err(Error::infeasible(
            format!(
                "peak {} of the free source is below the feasible lower bound {}",
                s.peak_free, interval.lower
            ),
            vec![interval],
        ));
    }
    Ok((s, interval))
}

fn candidate(
    params: &SystemParams,
    s: &Slice,
    p_free: f64,
    min_success: f64,
    provenance: Provenance,
) -> Result<Candidate> {
    let objective = s.objective(params, p_free, min_success);
    if !objective.is_feasible() {
        return Err(Error::Consistency(format!(
            "slice optimum {p_free} for {:?} at fixed power {} is infeasible",
            s.direction, s.p_fixed
        )));
    }
    let (p_a, p_b) = s.direction.point(s.p_fixed, p_free);
    Ok(Candidate {
        p_a,
        p_b,
        objective,
        provenance,
    })
}

/// Golden-section search of the slice over `(g + ε, min(peak, h − ε))`.
pub fn numeric_fallback(
    params: &SystemParams,
    fixed_power: f64,
    direction: Direction,
    opts: &OptimizerOptions,
    tol: f64,
    max_iter: usize,
) -> Result<Candidate> {
    let (s, interval) = usable_interval(params, fixed_power, direction, opts)?;
    let eps = 1e-9 * (interval.upper - interval.lower);
    let lo = interval.lower + eps;
    let hi = s.peak_free.min(interval.upper - eps);
    if hi <= lo {
        return Err(Error::infeasible("feasible slice collapses below the peak", vec![interval]));
    }
    let f = |p: f64| s.objective(params, p, opts.min_success).value().unwrap_or(f64::INFINITY);
    let best = golden_section(f, lo, hi, tol, max_iter);
    candidate(params, &s, best.x, opts.min_success, Provenance::NumericFallback)
}

/// Minimiser of the slice subject to the free source's peak.
///
/// Uses the closed-form interior root, clipped to the peak. Falls back to
/// [`numeric_fallback`] when `κ` is degenerate or the root fails its
/// runtime interval check.
pub fn conditional_optimum(
    params: &SystemParams,
    fixed_power: f64,
    direction: Direction,
    opts: &OptimizerOptions,
) -> Result<Candidate> {
    let (s, interval) = usable_interval(params, fixed_power, direction, opts)?;
    let coeffs = lemma_coefficients(params, fixed_power, direction)?;
    let fallback = || numeric_fallback(params, fixed_power, direction, opts, FALLBACK_TOL, FALLBACK_MAX_ITER);
    if coeffs.kappa_is_degenerate() {
        warn!("kappa {} is degenerate for {direction:?} at {fixed_power}; using golden section", coeffs.kappa);
        return fallback();
    }
    let root = coeffs.interior_root();
    if !interval.contains(root) {
        warn!(
            "closed-form root {root} outside ({}, {}) for {direction:?} at {fixed_power}; using golden section",
            interval.lower, interval.upper
        );
        return fallback();
    }
    if root >= s.peak_free {
        candidate(params, &s, s.peak_free, opts.min_success, Provenance::ClampedToPeak)
    } else {
        candidate(params, &s, root, opts.min_success, direction.closed_form_provenance())
    }
}
