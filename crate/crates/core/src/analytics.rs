//! Closed-form predictions for the massless (Maryland, `+` sign) dynamics.
//!
//! Kicks followed by linear free evolution act, to second order in the
//! commutator expansion, like the static Hamiltonian
//! `2πα p + A cos(θ + δs)`. Its classical orbit is a momentum-space Bloch
//! oscillation of period `1/α`; where that orbit meets `p = 0` the massive
//! model has an avoided crossing, and a single passage through it is a
//! Landau-Zener problem with sweep rate `2πα·v`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Slack allowed when the arccos argument lands just outside `[-1, 1]`.
pub const GRAZING_TOLERANCE: f64 = 1e-12;

/// Parameters of the effective static Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveParams {
    /// Drive amplitude `A`.
    pub amplitude: f64,
    /// Phase shift `δs` in radians, always in `(-π/2, π/2)`.
    pub phase_shift: f64,
    /// Bloch period `T_B = 1/α`, in units of time (kicks when `T = 1`).
    pub bloch_period: f64,
    /// Half the peak-to-peak momentum excursion, `A / 2πα`.
    pub osc_amplitude: f64,
}

pub fn effective_params(kick: f64, period: f64, alpha: f64) -> EffectiveParams {
    let cos_coeff = 1.0 / period + PI * PI * alpha * alpha / 3.0;
    let sin_coeff = PI * alpha;
    let amplitude = kick * cos_coeff.hypot(sin_coeff);
    EffectiveParams {
        amplitude,
        phase_shift: (sin_coeff / cos_coeff).atan(),
        bloch_period: 1.0 / alpha,
        osc_amplitude: amplitude / (2.0 * PI * alpha),
    }
}

/// Packet-center trajectory `(θ_c, p_c)` starting from `(0, p0)`.
pub fn bloch_trajectory(t: f64, p0: f64, ep: &EffectiveParams, alpha: f64) -> (f64, f64) {
    let omega = 2.0 * PI * alpha;
    let r = ep.osc_amplitude;
    let theta = omega * t;
    let p = p0 + r * ep.phase_shift.cos() - r * (theta + ep.phase_shift).cos();
    (theta, p)
}

/// Outcome of solving `p_c(t) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Crossing {
    /// Both zeros of `p_c` within the first Bloch period, in increasing order.
    /// They coincide for a grazing crossing.
    At { first: f64, second: f64 },
    /// The orbit never reaches `p = 0`; carries the out-of-range arccos argument.
    Never { argument: f64 },
}

impl Crossing {
    pub fn first(&self) -> Option<f64> {
        match *self {
            Crossing::At { first, .. } => Some(first),
            Crossing::Never { .. } => None,
        }
    }

    pub fn second(&self) -> Option<f64> {
        match *self {
            Crossing::At { second, .. } => Some(second),
            Crossing::Never { .. } => None,
        }
    }
}

/// Times at which the Bloch orbit crosses the anti-crossing line `p = 0`.
///
/// For `p0 ≤ 0` the first root is `(arccos(2παp0/A + cos δs) − δs) / 2πα`.
/// The argument is clamped only when it overshoots `±1` by at most
/// [`GRAZING_TOLERANCE`].
pub fn crossing_time(p0: f64, ep: &EffectiveParams, alpha: f64) -> Crossing {
    let omega = 2.0 * PI * alpha;
    let argument = omega * p0 / ep.amplitude + ep.phase_shift.cos();
    if !argument.is_finite() || argument.abs() > 1.0 + GRAZING_TOLERANCE {
        return Crossing::Never { argument };
    }
    let phase = argument.clamp(-1.0, 1.0).acos();
    let two_pi = 2.0 * PI;
    // Zeros satisfy ωt + δs = ±phase (mod 2π); fold both into [0, 2π).
    let fold = |x: f64| {
        let y = x.rem_euclid(two_pi);
        // rem_euclid can return exactly 2π for tiny negative inputs
        if y >= two_pi - 1e-15 {
            0.0
        } else {
            y
        }
    };
    let a = fold(phase - ep.phase_shift) / omega;
    let b = fold(two_pi - phase - ep.phase_shift) / omega;
    Crossing::At {
        first: a.min(b),
        second: a.max(b),
    }
}

/// Packet-center velocity `v = A sin(2πα t1 + δs)` at a crossing.
pub fn crossing_velocity(t1: f64, ep: &EffectiveParams, alpha: f64) -> f64 {
    ep.amplitude * (2.0 * PI * alpha * t1 + ep.phase_shift).sin()
}

/// The sweep denominator `2α·√|A² − (2παp0 + A cos δs)²|` of the tunneling exponent.
pub fn lz_denominator(p0: f64, ep: &EffectiveParams, alpha: f64) -> f64 {
    2.0 * alpha * lz_velocity_sqr(p0, ep, alpha).sqrt()
}

fn lz_velocity_sqr(p0: f64, ep: &EffectiveParams, alpha: f64) -> f64 {
    let shifted = 2.0 * PI * alpha * p0 + ep.amplitude * ep.phase_shift.cos();
    (ep.amplitude * ep.amplitude - shifted * shifted).abs()
}

/// Single-passage Landau-Zener tunneling probability
/// `exp(−M² / (2α √|A² − (2παp0 + A cos δs)²|))`.
pub fn lz_probability(mass: f64, alpha: f64, kick: f64, period: f64, p0: f64) -> Result<f64> {
    let ep = effective_params(kick, period, alpha);
    if let Crossing::Never { argument } = crossing_time(p0, &ep, alpha) {
        return Err(Error::NoCrossing { argument });
    }
    if mass == 0.0 {
        return Ok(1.0);
    }
    let velocity_sqr = lz_velocity_sqr(p0, &ep, alpha);
    if velocity_sqr < GRAZING_TOLERANCE {
        return Err(Error::DegenerateSweep { velocity_sqr });
    }
    Ok((-mass * mass / lz_denominator(p0, &ep, alpha)).exp())
}

/// A point on one of the two post-crossing branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoint {
    pub theta: f64,
    pub p: f64,
}

/// Predicted trajectories after the wave packet splits at `(t1, θ1, p = 0)`.
///
/// Branch A is the tunneled part: it keeps following the original orbit.
/// Branch B stays in its band, which flips the sign of the linear dispersion,
/// so it restarts from `(θ1, 0)` under `−2παp + A cos(θ − δs)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitBranches {
    pub t1: f64,
    pub theta1: f64,
    pub p0: f64,
    pub effective: EffectiveParams,
    pub alpha: f64,
    /// Probability carried by branch A; branch B carries the rest.
    pub tunneled_weight: f64,
}

impl SplitBranches {
    pub fn tunneled(&self, t: f64) -> BranchPoint {
        let (theta, p) = bloch_trajectory(t, self.p0, &self.effective, self.alpha);
        BranchPoint { theta, p }
    }

    pub fn reflected(&self, t: f64) -> BranchPoint {
        let omega = 2.0 * PI * self.alpha;
        let r = self.effective.osc_amplitude;
        let start = self.theta1 - self.effective.phase_shift;
        let elapsed = t - self.t1;
        BranchPoint {
            theta: self.theta1 - omega * elapsed,
            p: r * ((start - omega * elapsed).cos() - start.cos()),
        }
    }

    pub fn reflected_weight(&self) -> f64 {
        1.0 - self.tunneled_weight
    }
}

/// Builds both branches; `p_lz` is the tunneled fraction (use [`lz_probability`]).
pub fn split_branches(
    t1: f64,
    theta1: f64,
    p0: f64,
    ep: &EffectiveParams,
    alpha: f64,
    p_lz: f64,
) -> Result<SplitBranches> {
    if !(t1.is_finite() && theta1.is_finite()) || t1 < 0.0 {
        return Err(Error::contract(format!(
            "split_branches needs a valid crossing, got t1 = {t1}, theta1 = {theta1}"
        )));
    }
    if !(0.0..=1.0).contains(&p_lz) {
        return Err(Error::contract(format!("tunneling weight {p_lz} outside [0, 1]")));
    }
    Ok(SplitBranches {
        t1,
        theta1,
        p0,
        effective: *ep,
        alpha,
        tunneled_weight: p_lz,
    })
}
