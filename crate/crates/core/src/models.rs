//! One-kick Floquet steppers.
//!
//! Every model shares the kick `exp(−iK cos θ)` and differs only in the free
//! evolution between kicks, which is diagonal in momentum (and 2×2 in spin for
//! the Dirac rotor). One period is `F(T) = kick · free`: free evolution in the
//! momentum representation, transform, kick, transform back.

use std::f64::consts::PI;

use log::warn;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{momentum_of_bin, Grid};
use crate::observables::{self, ObservableRecord, ObservableSeries};
use crate::state::{Representation, ScalarState, SpinorState, WaveFunction};

/// Dynamical model selecting the free-evolution generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// `2παp σx + M σz` acting on a two-component spinor.
    DiracSpinor,
    /// `+2παp`
    MarylandPlus,
    /// `−2παp`
    MarylandMinus,
    /// `√((2παp)² + M²)`
    SpinlessRelativistic,
    /// `2π²α²p²/M + M`
    Qkr,
}

impl Model {
    pub const ALL: [Model; 5] = [
        Model::DiracSpinor,
        Model::MarylandPlus,
        Model::MarylandMinus,
        Model::SpinlessRelativistic,
        Model::Qkr,
    ];

    pub fn is_spinor(self) -> bool {
        matches!(self, Model::DiracSpinor)
    }

    pub fn name(self) -> &'static str {
        match self {
            Model::DiracSpinor => "dirac_spinor",
            Model::MarylandPlus => "maryland_plus",
            Model::MarylandMinus => "maryland_minus",
            Model::SpinlessRelativistic => "spinless_relativistic",
            Model::Qkr => "qkr",
        }
    }
}

/// Physical and numerical parameters of one trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    /// `2πα` is the effective speed of light.
    pub alpha: f64,
    #[serde(alias = "M")]
    pub mass: f64,
    #[serde(alias = "K")]
    pub kick: f64,
    #[serde(alias = "T")]
    pub period: f64,
    pub n_modes: usize,
    pub model: Model,
}

impl SimParams {
    /// Defaults of the reference run: α = 0.01, K = 2, T = 1, M = 0, N = 4096.
    pub fn new(model: Model) -> Self {
        Self {
            alpha: 0.01,
            mass: 0.0,
            kick: 2.0,
            period: 1.0,
            n_modes: crate::grid::DEFAULT_MODES,
            model,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let reals = [
            ("alpha", self.alpha),
            ("mass", self.mass),
            ("kick", self.kick),
            ("period", self.period),
        ];
        if let Some((name, v)) = reals.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::config(format!("{name} must be finite, got {v}")));
        }
        if self.alpha <= 0.0 {
            return Err(Error::config(format!("alpha must be positive, got {}", self.alpha)));
        }
        if self.period <= 0.0 {
            return Err(Error::config(format!("period must be positive, got {}", self.period)));
        }
        if self.mass < 0.0 || self.kick < 0.0 {
            return Err(Error::config(format!(
                "mass and kick must be non-negative, got M = {}, K = {}",
                self.mass, self.kick
            )));
        }
        if self.model == Model::Qkr && self.mass <= 0.0 {
            return Err(Error::config("the qkr dispersion needs M > 0"));
        }
        Ok(())
    }

    /// Off-diagonal element `2παp` of the two-level Hamiltonian.
    pub fn coupling(&self, p: i64) -> f64 {
        2.0 * PI * self.alpha * p as f64
    }

    /// Free-evolution energy of a scalar model at momentum `p`.
    pub fn scalar_energy(&self, p: i64) -> Result<f64> {
        let c = self.coupling(p);
        Ok(match self.model {
            Model::MarylandPlus => c,
            Model::MarylandMinus => -c,
            Model::SpinlessRelativistic => c.hypot(self.mass),
            Model::Qkr => {
                if self.mass <= 0.0 {
                    return Err(Error::config("the qkr dispersion needs M > 0"));
                }
                2.0 * PI * PI * self.alpha * self.alpha * (p * p) as f64 / self.mass + self.mass
            }
            Model::DiracSpinor => {
                return Err(Error::contract("dirac_spinor has no scalar dispersion"));
            }
        })
    }
}

/// `exp[−i(aσx + bσz)]` as `[u00, u01, u10, u11]`.
///
/// With `φ = √(a² + b²)` this is `cos φ·I − i (sin φ / φ)(aσx + bσz)`, and
/// exactly the identity at `φ = 0`.
pub fn dirac_free_matrix(a: f64, b: f64) -> [Complex64; 4] {
    let phi = a.hypot(b);
    if phi == 0.0 {
        let one = Complex64::new(1.0, 0.0);
        return [one, Complex64::default(), Complex64::default(), one];
    }
    let (sin, cos) = phi.sin_cos();
    let s = sin / phi;
    let off = Complex64::new(0.0, -s * a);
    [Complex64::new(cos, -s * b), off, off, Complex64::new(cos, s * b)]
}

/// Applies `free` (or its inverse) mode by mode.
#[derive(Debug, Clone)]
enum FreePropagator {
    Spinor(Vec<[Complex64; 4]>),
    Scalar(Vec<Complex64>),
}

impl FreePropagator {
    fn new(params: &SimParams, n_modes: usize) -> Result<Self> {
        let t = params.period;
        if params.model.is_spinor() {
            Ok(FreePropagator::Spinor(
                (0..n_modes)
                    .map(|k| dirac_free_matrix(params.coupling(momentum_of_bin(k, n_modes)) * t, params.mass * t))
                    .collect(),
            ))
        } else {
            (0..n_modes)
                .map(|k| Ok(Complex64::from_polar(1.0, -params.scalar_energy(momentum_of_bin(k, n_modes))? * t)))
                .collect::<Result<Vec<_>>>()
                .map(FreePropagator::Scalar)
        }
    }

    fn apply<S: WaveFunction>(&self, state: &mut S, inverse: bool) -> Result<()> {
        state.expect_representation(Representation::Momentum)?;
        match self {
            FreePropagator::Spinor(mats) => {
                let (up, down) = state
                    .spinor_parts_mut()
                    .ok_or_else(|| Error::contract("dirac_spinor model needs a spinor state"))?;
                check_len(up.len(), mats.len())?;
                for ((u, d), m) in up.iter_mut().zip(down.iter_mut()).zip(mats) {
                    // The matrix is symmetric, so its inverse is the elementwise conjugate.
                    let m = if inverse { m.map(|z| z.conj()) } else { *m };
                    let (x, y) = (*u, *d);
                    *u = m[0] * x + m[1] * y;
                    *d = m[2] * x + m[3] * y;
                }
            }
            FreePropagator::Scalar(phases) => {
                let mut comps = state.components_mut();
                if comps.len() != 1 {
                    return Err(Error::contract("scalar models need a scalar state"));
                }
                let amp = &mut comps[0];
                check_len(amp.len(), phases.len())?;
                for (z, ph) in amp.iter_mut().zip(phases) {
                    *z *= if inverse { ph.conj() } else { *ph };
                }
            }
        }
        Ok(())
    }
}

fn check_len(got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::contract(format!("state has {got} modes, stepper expects {want}")));
    }
    Ok(())
}

fn kick_phases(kick: f64, grid: &Grid) -> Vec<Complex64> {
    grid.bin_thetas().map(|theta| Complex64::from_polar(1.0, -kick * theta.cos())).collect()
}

fn apply_kick<S: WaveFunction>(state: &mut S, phases: &[Complex64], inverse: bool) -> Result<()> {
    state.expect_representation(Representation::Coordinate)?;
    for comp in state.components_mut() {
        check_len(comp.len(), phases.len())?;
        for (z, ph) in comp.iter_mut().zip(phases) {
            *z *= if inverse { ph.conj() } else { *ph };
        }
    }
    Ok(())
}

/// Free evolution of a spinor over one period (momentum representation).
pub fn free_step_dirac(state: &SpinorState, params: &SimParams) -> Result<SpinorState> {
    if !params.model.is_spinor() {
        return Err(Error::contract(format!("free_step_dirac called with model {}", params.model.name())));
    }
    let mut out = state.clone();
    FreePropagator::new(params, state.n_modes())?.apply(&mut out, false)?;
    Ok(out)
}

/// Free evolution of a scalar state over one period (momentum representation).
pub fn free_step_scalar(state: &ScalarState, params: &SimParams) -> Result<ScalarState> {
    if params.model.is_spinor() {
        return Err(Error::contract("free_step_scalar called with the dirac_spinor model"));
    }
    let mut out = state.clone();
    FreePropagator::new(params, state.n_modes())?.apply(&mut out, false)?;
    Ok(out)
}

/// Multiplies every component by `exp(−iK cos θ)` (coordinate representation).
pub fn kick_step<S: WaveFunction>(state: &S, params: &SimParams, grid: &Grid) -> Result<S> {
    let mut out = state.clone();
    apply_kick(&mut out, &kick_phases(params.kick, grid), false)?;
    Ok(out)
}

/// One full period `F(T)`; momentum representation in and out.
pub fn floquet_step<S: WaveFunction>(state: &S, params: &SimParams, grid: &Grid) -> Result<S> {
    let mut out = state.clone();
    FloquetStepper::new(params, grid)?.step(&mut out)?;
    Ok(out)
}

/// Precomputed per-mode factors for repeated Floquet steps.
#[derive(Debug, Clone)]
pub struct FloquetStepper {
    params: SimParams,
    grid: Grid,
    free: FreePropagator,
    kick: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl FloquetStepper {
    pub fn new(params: &SimParams, grid: &Grid) -> Result<Self> {
        params.validate()?;
        if params.n_modes != grid.n_modes() {
            return Err(Error::config(format!(
                "params ask for {} modes but the grid has {}",
                params.n_modes,
                grid.n_modes()
            )));
        }
        Ok(Self {
            params: *params,
            grid: grid.clone(),
            free: FreePropagator::new(params, grid.n_modes())?,
            kick: kick_phases(params.kick, grid),
            scratch: vec![Complex64::default(); grid.scratch_len()],
        })
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Free evolution, then the kick.
    pub fn step<S: WaveFunction>(&mut self, state: &mut S) -> Result<()> {
        self.free.apply(state, false)?;
        self.transform(state, Representation::Coordinate)?;
        apply_kick(state, &self.kick, false)?;
        self.transform(state, Representation::Momentum)
    }

    /// Exact inverse of [`FloquetStepper::step`]: undo the kick, then the free evolution.
    pub fn step_inverse<S: WaveFunction>(&mut self, state: &mut S) -> Result<()> {
        state.expect_representation(Representation::Momentum)?;
        self.transform(state, Representation::Coordinate)?;
        apply_kick(state, &self.kick, true)?;
        self.transform(state, Representation::Momentum)?;
        self.free.apply(state, true)
    }

    fn transform<S: WaveFunction>(&mut self, state: &mut S, target: Representation) -> Result<()> {
        for comp in state.components_mut() {
            check_len(comp.len(), self.grid.n_modes())?;
            match target {
                Representation::Coordinate => self.grid.to_coordinate_with_scratch(comp, &mut self.scratch),
                Representation::Momentum => self.grid.to_momentum_with_scratch(comp, &mut self.scratch),
            }
        }
        state.set_representation(target);
        Ok(())
    }
}

/// What to record besides moments, θ mean and band occupations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ObserverSelection {
    pub densities: bool,
}

/// Result of [`evolve`].
#[derive(Debug, Clone)]
pub struct Evolution<S> {
    pub series: ObservableSeries,
    pub final_state: S,
}

/// Fraction of the momentum lattice treated as the aliasing guard band, split
/// evenly between both edges.
pub const EDGE_FRACTION: f64 = 0.02;
/// Guard-band density above which a run is marked tainted.
pub const EDGE_THRESHOLD: f64 = 1e-8;

/// Total momentum density in the outer [`EDGE_FRACTION`] of the lattice.
pub fn edge_density<S: WaveFunction>(state: &S) -> f64 {
    let n = state.n_modes();
    let per_side = ((n as f64 * EDGE_FRACTION / 2.0).ceil() as i64).max(1);
    let half = (n / 2) as i64;
    state
        .density()
        .iter()
        .enumerate()
        .filter(|(k, _)| {
            let p = momentum_of_bin(*k, n);
            p < -half + per_side || p >= half - per_side
        })
        .map(|(_, r)| r)
        .sum()
}

/// Applies `n_kicks` Floquet steps, recording at `t = 0`, every `record_every`
/// kicks, and at the final kick.
pub fn evolve<S: WaveFunction>(
    initial: &S,
    params: &SimParams,
    grid: &Grid,
    n_kicks: usize,
    record_every: usize,
    observers: ObserverSelection,
) -> Result<Evolution<S>> {
    if n_kicks == 0 {
        return Err(Error::config("n_kicks must be at least 1"));
    }
    if record_every == 0 {
        return Err(Error::config("record_every must be at least 1"));
    }
    initial.expect_representation(Representation::Momentum)?;
    let mut stepper = FloquetStepper::new(params, grid)?;
    let mut state = initial.clone();
    let mut series = ObservableSeries::default();
    let mut theta_prev = 0.0;

    let mut record = |t: usize, state: &S, series: &mut ObservableSeries| -> Result<()> {
        let rec = ObservableRecord::measure(t, state, params, grid, theta_prev, observers.densities)?;
        match rec.theta_mean {
            Some(theta) => theta_prev = theta,
            None => series.note(format!("t = {t}: circular mean undefined (near-uniform coordinate density)")),
        }
        series.records.push(rec);
        let edge = edge_density(state);
        if edge > EDGE_THRESHOLD && !series.tainted {
            warn!("edge aliasing at t = {t}: guard-band density {edge:e}");
            series.tainted = true;
            series.note(format!("t = {t}: edge aliasing, guard-band density {edge:e} > {EDGE_THRESHOLD:e}"));
        }
        Ok(())
    };

    record(0, &state, &mut series)?;
    for t in 1..=n_kicks {
        stepper.step(&mut state)?;
        if t % record_every == 0 || t == n_kicks {
            record(t, &state, &mut series)?;
        }
    }
    Ok(Evolution {
        series,
        final_state: state,
    })
}

/// Convenience re-export so callers can measure without importing `observables`.
pub use observables::band_occupations;
