//! System model for the two-way amplify-and-forward status update exchange.
//!
//! Two sources `A` and `B` swap status updates through a relay `R` using a
//! two-slot physical-layer network coding round: both sources transmit in the
//! first slot, the relay amplifies the superimposed signal and broadcasts it
//! in the second. Everything here is a pure function of its inputs.
//!
//! Success probabilities follow the high-SNR expansion
//!
//! ```text
//! F_A = 1 - γ_th [ σ_r²/P_B + (σ_A²/P_r)(1 + P_A/P_B) ]
//! F_B = 1 - γ_th [ σ_r²/P_A + (σ_B²/P_r)(1 + P_B/P_A) ]
//! ```
//!
//! and the per-destination average age is `1/2 + 2/F` slots.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `weight_a + weight_b = 1`.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// A receiving source. The transmitting peer is [`Destination::other`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Destination {
    A,
    B,
}

impl Destination {
    pub fn other(self) -> Self {
        match self {
            Destination::A => Destination::B,
            Destination::B => Destination::A,
        }
    }
}

/// Converts a threshold in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Noise, threshold, weighting and peak-power description of one system.
///
/// `gamma_th` is linear. A zero threshold is accepted and means every round
/// succeeds; the optimizer rejects it since its feasible sets are unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub sigma2_a: f64,
    pub sigma2_b: f64,
    pub sigma2_r: f64,
    pub gamma_th: f64,
    pub weight_a: f64,
    pub weight_b: f64,
    pub peak_a: f64,
    pub peak_b: f64,
    pub peak_r: f64,
}

impl Default for SystemParams {
    /// Unit-variance reference setup: all noise variances 0.001, 20 dB
    /// threshold, equal weights, peaks (1, 2) with the relay at 0.75 of
    /// source A's peak.
    fn default() -> Self {
        SystemParams {
            sigma2_a: 1e-3,
            sigma2_b: 1e-3,
            sigma2_r: 1e-3,
            gamma_th: db_to_linear(20.0),
            weight_a: 0.5,
            weight_b: 0.5,
            peak_a: 1.0,
            peak_b: 2.0,
            peak_r: 0.75,
        }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("sigma2_a", self.sigma2_a),
            ("sigma2_b", self.sigma2_b),
            ("sigma2_r", self.sigma2_r),
            ("peak_a", self.peak_a),
            ("peak_b", self.peak_b),
            ("peak_r", self.peak_r),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if !(self.gamma_th.is_finite() && self.gamma_th >= 0.0) {
            return Err(Error::domain(format!(
                "gamma_th must be finite and >= 0, got {}",
                self.gamma_th
            )));
        }
        for (name, w) in [("weight_a", self.weight_a), ("weight_b", self.weight_b)] {
            if !(w > 0.0 && w < 1.0) {
                return Err(Error::domain(format!("{name} must lie in (0, 1), got {w}")));
            }
        }
        if (self.weight_a + self.weight_b - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::domain(format!(
                "weights must sum to 1, got {} + {}",
                self.weight_a, self.weight_b
            )));
        }
        Ok(())
    }

    pub fn with_gamma_th_db(mut self, db: f64) -> Self {
        self.gamma_th = db_to_linear(db);
        self
    }

    /// Exchanges the roles of `A` and `B`.
    pub fn swapped(&self) -> Self {
        SystemParams {
            sigma2_a: self.sigma2_b,
            sigma2_b: self.sigma2_a,
            weight_a: self.weight_b,
            weight_b: self.weight_a,
            peak_a: self.peak_b,
            peak_b: self.peak_a,
            ..*self
        }
    }

    pub fn noise(&self, at: Destination) -> f64 {
        match at {
            Destination::A => self.sigma2_a,
            Destination::B => self.sigma2_b,
        }
    }

    pub fn weight(&self, at: Destination) -> f64 {
        match at {
            Destination::A => self.weight_a,
            Destination::B => self.weight_b,
        }
    }

    pub fn peak(&self, at: Destination) -> f64 {
        match at {
            Destination::A => self.peak_a,
            Destination::B => self.peak_b,
        }
    }
}

/// Transmit powers for one operating point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerProfile {
    pub p_a: f64,
    pub p_b: f64,
    pub p_r: f64,
}

impl PowerProfile {
    pub fn new(p_a: f64, p_b: f64, p_r: f64) -> Result<Self> {
        let p = PowerProfile { p_a, p_b, p_r };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("p_a", self.p_a), ("p_b", self.p_b), ("p_r", self.p_r)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Checks positivity and the peak constraints of `params`.
    pub fn validate_against(&self, params: &SystemParams) -> Result<()> {
        self.validate()?;
        for (name, v, peak) in [
            ("p_a", self.p_a, params.peak_a),
            ("p_b", self.p_b, params.peak_b),
            ("p_r", self.p_r, params.peak_r),
        ] {
            if v > peak {
                return Err(Error::domain(format!("{name} = {v} exceeds its peak {peak}")));
            }
        }
        Ok(())
    }

    pub fn swapped(&self) -> Self {
        PowerProfile {
            p_a: self.p_b,
            p_b: self.p_a,
            p_r: self.p_r,
        }
    }

    pub fn source(&self, at: Destination) -> f64 {
        match at {
            Destination::A => self.p_a,
            Destination::B => self.p_b,
        }
    }
}

/// Transmit powers normalised by the noise variance at the receiving node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizedSnrs {
    /// `P_A / σ_r²`
    pub gamma_a: f64,
    /// `P_B / σ_r²`
    pub gamma_b: f64,
    /// `P_r / σ_A²`
    pub gamma_ra: f64,
    /// `P_r / σ_B²`
    pub gamma_rb: f64,
}

impl NormalizedSnrs {
    fn source(&self, at: Destination) -> f64 {
        match at {
            Destination::A => self.gamma_a,
            Destination::B => self.gamma_b,
        }
    }

    fn relay_to(&self, at: Destination) -> f64 {
        match at {
            Destination::A => self.gamma_ra,
            Destination::B => self.gamma_rb,
        }
    }
}

pub fn normalized_snrs(params: &SystemParams, powers: &PowerProfile) -> Result<NormalizedSnrs> {
    params.validate()?;
    powers.validate()?;
    Ok(NormalizedSnrs {
        gamma_a: powers.p_a / params.sigma2_r,
        gamma_b: powers.p_b / params.sigma2_r,
        gamma_ra: powers.p_r / params.sigma2_a,
        gamma_rb: powers.p_r / params.sigma2_b,
    })
}

/// End-to-end SNR at `dest` for one fading realisation.
///
/// `gain_dest` is `|h|²` on the relay-`dest` hop and `gain_src` on the hop
/// from the transmitting peer.
pub fn instantaneous_snr(
    snrs: &NormalizedSnrs,
    gain_dest: f64,
    gain_src: f64,
    dest: Destination,
) -> f64 {
    let relay = snrs.relay_to(dest);
    let own = snrs.source(dest);
    let peer = snrs.source(dest.other());
    let num = relay * peer * gain_dest * gain_src;
    if num == 0.0 {
        return 0.0;
    }
    num / ((relay + own) * gain_dest + peer * gain_src + 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuccessKind {
    Asymptotic,
    Empirical,
}

/// Success probabilities of the two directions.
///
/// `f_a` is for the link `B -> R -> A`, `f_b` for `A -> R -> B`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuccessPair {
    pub f_a: f64,
    pub f_b: f64,
    pub kind: SuccessKind,
    pub ci_halfwidth_a: Option<f64>,
    pub ci_halfwidth_b: Option<f64>,
}

impl SuccessPair {
    pub fn asymptotic(f_a: f64, f_b: f64) -> Self {
        SuccessPair {
            f_a,
            f_b,
            kind: SuccessKind::Asymptotic,
            ci_halfwidth_a: None,
            ci_halfwidth_b: None,
        }
    }

    pub fn get(&self, at: Destination) -> f64 {
        match at {
            Destination::A => self.f_a,
            Destination::B => self.f_b,
        }
    }

    /// Asymptotic values must be strictly inside (0, 1); empirical ones in [0, 1].
    pub fn is_valid_for(&self, at: Destination) -> bool {
        let f = self.get(at);
        match self.kind {
            SuccessKind::Asymptotic => f > 0.0 && f < 1.0,
            SuccessKind::Empirical => (0.0..=1.0).contains(&f),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.is_valid_for(Destination::A) && self.is_valid_for(Destination::B)
    }
}

/// High-SNR success probability of the link ending at the node with noise
/// `sigma2_dest` and power `p_dest`, fed by a peer transmitting `p_src`.
pub(crate) fn asymptotic_link(
    gamma_th: f64,
    sigma2_r: f64,
    sigma2_dest: f64,
    p_dest: f64,
    p_src: f64,
    p_r: f64,
) -> f64 {
    1.0 - gamma_th * (sigma2_r / p_src + sigma2_dest / p_r * (1.0 + p_dest / p_src))
}

/// Asymptotic success pair. Values outside (0, 1) are returned as-is and
/// reported through [`SuccessPair::is_valid`].
pub fn asymptotic_success(params: &SystemParams, powers: &PowerProfile) -> Result<SuccessPair> {
    params.validate()?;
    powers.validate()?;
    let PowerProfile { p_a, p_b, p_r } = *powers;
    let f_a = asymptotic_link(params.gamma_th, params.sigma2_r, params.sigma2_a, p_a, p_b, p_r);
    let f_b = asymptotic_link(params.gamma_th, params.sigma2_r, params.sigma2_b, p_b, p_a, p_r);
    Ok(SuccessPair::asymptotic(f_a, f_b))
}

/// Average age at one destination, `1/2 + 2/f` slots.
pub fn aoi_per_source(f: f64) -> Result<f64> {
    if !(f > 0.0 && f <= 1.0) {
        return Err(Error::domain(format!("success probability must be in (0, 1], got {f}")));
    }
    Ok(0.5 + 2.0 / f)
}

/// Per-destination and weighted average age, all in slots.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AoiSummary {
    pub aoi_a: f64,
    pub aoi_b: f64,
    pub weighted: f64,
}

pub fn weighted_sum_aoi(params: &SystemParams, pair: &SuccessPair) -> Result<AoiSummary> {
    let aoi_a = aoi_per_source(pair.f_a)?;
    let aoi_b = aoi_per_source(pair.f_b)?;
    let (wa, wb) = (params.weight_a, params.weight_b);
    let weighted = 0.5 * (wa + wb) + 2.0 * (wa / pair.f_a + wb / pair.f_b);
    Ok(AoiSummary {
        aoi_a,
        aoi_b,
        weighted,
    })
}

/// Value of the power-allocation objective `2(ω_A/F_A + ω_B/F_B)`, the
/// weighted sum age minus its constant `1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "status", content = "value")]
pub enum Objective {
    Feasible(f64),
    /// At least one success probability falls outside (0, 1).
    Infeasible,
}

impl Objective {
    pub fn value(&self) -> Option<f64> {
        match *self {
            Objective::Feasible(v) => Some(v),
            Objective::Infeasible => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Objective::Feasible(_))
    }
}

/// Objective at an arbitrary relay power. Feasibility additionally requires
/// both probabilities to exceed `min_success`.
pub(crate) fn objective_at(
    params: &SystemParams,
    p_a: f64,
    p_b: f64,
    p_r: f64,
    min_success: f64,
) -> Objective {
    if !(p_a > 0.0 && p_b > 0.0 && p_r > 0.0) {
        return Objective::Infeasible;
    }
    let f_a = asymptotic_link(params.gamma_th, params.sigma2_r, params.sigma2_a, p_a, p_b, p_r);
    let f_b = asymptotic_link(params.gamma_th, params.sigma2_r, params.sigma2_b, p_b, p_a, p_r);
    let ok = |f: f64| f > min_success.max(0.0) && f < 1.0;
    if ok(f_a) && ok(f_b) {
        Objective::Feasible(2.0 * (params.weight_a / f_a + params.weight_b / f_b))
    } else {
        Objective::Infeasible
    }
}

/// Objective with the relay pinned at its peak power.
pub fn objective_f(params: &SystemParams, p_a: f64, p_b: f64) -> Objective {
    objective_at(params, p_a, p_b, params.peak_r, 0.0)
}

/// Objective at an explicit relay power.
pub fn objective_with_relay(params: &SystemParams, p_a: f64, p_b: f64, p_r: f64) -> Objective {
    objective_at(params, p_a, p_b, p_r, 0.0)
}
