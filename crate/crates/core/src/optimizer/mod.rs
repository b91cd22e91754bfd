//! Peak-power-constrained minimisation of the weighted sum age.
//!
//! The objective `2(ω_A/F_A + ω_B/F_B)` decreases in the relay power, so the
//! relay always transmits at its peak. With one source power fixed the
//! remaining slice is convex and its minimiser has a closed form (see
//! [`slice`]). The global optimum puts at least one source at its peak, so it
//! is the better of two slice optima: `P_A` at peak solving for `P_B`, and
//! `P_B` at peak solving for `P_A`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Destination, Objective, SystemParams};

pub mod search;
pub mod slice;

pub use search::{golden_section, grid_search_oracle, GoldenResult};
pub use slice::{
    conditional_optimum, feasible_interval, lemma_coefficients, numeric_fallback, rejected_root,
    second_derivative_slice, FeasibleInterval, LemmaCoefficients, FALLBACK_MAX_ITER, FALLBACK_TOL,
};

/// Default grid resolution in power units.
pub const DEFAULT_GRID_STEP: f64 = 1e-3;

/// Relative gap under which the two boundary candidates count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Which source power is solved for; the other one is held fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// `P_A` fixed, optimise `P_B`.
    SolveForB,
    /// `P_B` fixed, optimise `P_A`.
    SolveForA,
}

impl Direction {
    pub fn fixed(self) -> Destination {
        match self {
            Direction::SolveForB => Destination::A,
            Direction::SolveForA => Destination::B,
        }
    }

    pub fn free(self) -> Destination {
        self.fixed().other()
    }

    /// `(p_a, p_b)` from the fixed and free powers.
    pub fn point(self, fixed: f64, free: f64) -> (f64, f64) {
        match self {
            Direction::SolveForB => (fixed, free),
            Direction::SolveForA => (free, fixed),
        }
    }

    /// `(fixed, free)` from `(p_a, p_b)`.
    pub fn split(self, p_a: f64, p_b: f64) -> (f64, f64) {
        match self {
            Direction::SolveForB => (p_a, p_b),
            Direction::SolveForA => (p_b, p_a),
        }
    }

    pub fn closed_form_provenance(self) -> Provenance {
        match self {
            Direction::SolveForB => Provenance::Lemma1AtPeakA,
            Direction::SolveForA => Provenance::Lemma2AtPeakB,
        }
    }
}

/// How a candidate's free power was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Closed-form interior root for `P_B` with `P_A` fixed.
    #[serde(rename = "lemma1-at-peakA")]
    Lemma1AtPeakA,
    /// Closed-form interior root for `P_A` with `P_B` fixed.
    #[serde(rename = "lemma2-at-peakB")]
    Lemma2AtPeakB,
    /// Interior root exceeded the free source's peak.
    ClampedToPeak,
    NumericFallback,
    GridSearch,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Lemma1AtPeakA => "lemma1-at-peakA",
            Provenance::Lemma2AtPeakB => "lemma2-at-peakB",
            Provenance::ClampedToPeak => "clamped-to-peak",
            Provenance::NumericFallback => "numeric-fallback",
            Provenance::GridSearch => "grid-search",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub p_a: f64,
    pub p_b: f64,
    pub objective: Objective,
    pub provenance: Provenance,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOptions {
    /// Both success probabilities must exceed this floor; 0 keeps only the
    /// `(0, 1)` validity constraint.
    pub min_success: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        OptimizerOptions { min_success: 0.0 }
    }
}

impl OptimizerOptions {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.min_success) {
            return Err(Error::domain(format!(
                "min_success must lie in [0, 1), got {}",
                self.min_success
            )));
        }
        Ok(())
    }
}

/// Second-derivative check along a solved slice.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceCertificate {
    pub direction: Direction,
    pub p_a: f64,
    pub p_b: f64,
    pub second_derivative: f64,
    pub positive: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerResult {
    pub p_a_star: f64,
    pub p_b_star: f64,
    pub p_r_star: f64,
    /// Minimum objective value `f(P_A*, P_B*)`.
    pub objective_star: f64,
    /// `1/2 + objective_star`, in slots.
    pub aoi_star: f64,
    /// Direction of the winning candidate.
    pub selected: Direction,
    /// The two candidates tied and the peak-`A` one was kept.
    pub tie: bool,
    /// `P_A` at peak, `P_B` optimised.
    pub peak_a_candidate: Option<Candidate>,
    /// `P_B` at peak, `P_A` optimised.
    pub peak_b_candidate: Option<Candidate>,
    pub certificates: Vec<SliceCertificate>,
}

impl OptimizerResult {
    pub fn candidate(&self, direction: Direction) -> Option<&Candidate> {
        match direction {
            Direction::SolveForB => self.peak_a_candidate.as_ref(),
            Direction::SolveForA => self.peak_b_candidate.as_ref(),
        }
    }
}

fn boundary_candidate(
    params: &SystemParams,
    direction: Direction,
    opts: &OptimizerOptions,
    diagnostics: &mut Vec<FeasibleInterval>,
) -> Result<Option<Candidate>> {
    let fixed = params.peak(direction.fixed());
    match conditional_optimum(params, fixed, direction, opts) {
        Ok(c) => Ok(Some(c)),
        Err(Error::Infeasible { intervals, .. }) => {
            diagnostics.extend(intervals);
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

/// Optimal powers: relay at peak, then the better of the two boundary
/// candidates. Exact ties go to the candidate with `P_A` at its peak.
pub fn theorem1_optimize(params: &SystemParams, opts: &OptimizerOptions) -> Result<OptimizerResult> {
    params.validate()?;
    opts.validate()?;
    let mut diagnostics = Vec::new();
    let at_peak_a = boundary_candidate(params, Direction::SolveForB, opts, &mut diagnostics)?;
    let at_peak_b = boundary_candidate(params, Direction::SolveForA, opts, &mut diagnostics)?;

    let value = |c: &Option<Candidate>| c.as_ref().and_then(|c| c.objective.value());
    let (selected, tie) = match (value(&at_peak_a), value(&at_peak_b)) {
        (None, None) => {
            return Err(Error::infeasible(
                "neither boundary candidate is feasible",
                diagnostics,
            ))
        }
        (Some(_), None) => (Direction::SolveForB, false),
        (None, Some(_)) => (Direction::SolveForA, false),
        (Some(fa), Some(fb)) => {
            if (fa - fb).abs() <= TIE_TOLERANCE * fa.abs().max(fb.abs()) {
                (Direction::SolveForB, true)
            } else if fa < fb {
                (Direction::SolveForB, false)
            } else {
                (Direction::SolveForA, false)
            }
        }
    };
    let winner = match selected {
        Direction::SolveForB => at_peak_a.unwrap(),
        Direction::SolveForA => at_peak_b.unwrap(),
    };
    let objective_star = winner.objective.value().unwrap();

    let mut certificates = Vec::new();
    for (dir, cand) in [(Direction::SolveForB, &at_peak_a), (Direction::SolveForA, &at_peak_b)] {
        if let Some(c) = cand {
            let d2 = second_derivative_slice(params, c.p_a, c.p_b, dir)?;
            certificates.push(SliceCertificate {
                direction: dir,
                p_a: c.p_a,
                p_b: c.p_b,
                second_derivative: d2,
                positive: d2 > 0.0,
            });
        }
    }

    Ok(OptimizerResult {
        p_a_star: winner.p_a,
        p_b_star: winner.p_b,
        p_r_star: params.peak_r,
        objective_star,
        aoi_star: 0.5 + objective_star,
        selected,
        tie,
        peak_a_candidate: at_peak_a,
        peak_b_candidate: at_peak_b,
        certificates,
    })
}
