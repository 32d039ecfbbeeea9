//! C ABI for the kicked Dirac rotor simulator.
//!
//! Every fallible function returns a [`KdStatus`]; on failure a message is
//! available from [`kd_last_error_message`] on the same thread. Panics never
//! cross the boundary. Simulations are opaque [`KdSimulation`] handles owned
//! by the caller and released with [`kd_simulation_free`].

use std::cell::{Cell, RefCell};
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;

use kicked_dirac::analytics::{self, Crossing};
use kicked_dirac::observables::ObservableRecord;
use kicked_dirac::state::{make_gaussian_scalar, make_gaussian_spinor};
use kicked_dirac::{Error, FloquetStepper, GaussianSpec, Grid, Model, ScalarState, SimParams, SpinorState, WaveFunction};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    NoCrossing = 4,
    BufferTooSmall = 5,
    Internal = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KdModel {
    DiracSpinor = 0,
    MarylandPlus = 1,
    MarylandMinus = 2,
    SpinlessRelativistic = 3,
    Qkr = 4,
}

fn model_from_raw(raw: u32) -> Option<Model> {
    Some(match raw {
        x if x == KdModel::DiracSpinor as u32 => Model::DiracSpinor,
        x if x == KdModel::MarylandPlus as u32 => Model::MarylandPlus,
        x if x == KdModel::MarylandMinus as u32 => Model::MarylandMinus,
        x if x == KdModel::SpinlessRelativistic as u32 => Model::SpinlessRelativistic,
        x if x == KdModel::Qkr as u32 => Model::Qkr,
        _ => return None,
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct KdParams {
    pub alpha: f64,
    pub mass: f64,
    pub kick: f64,
    pub period: f64,
    /// Power of two, at least 4.
    pub n_modes: usize,
    /// A `KdModel` value.
    pub model: u32,
}

/// Gaussian packet; the spinor is ignored by scalar models.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct KdGaussian {
    pub p0: f64,
    pub delta_p: f64,
    pub chi_re: [f64; 2],
    pub chi_im: [f64; 2],
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct KdEffectiveParams {
    pub amplitude: f64,
    pub phase_shift: f64,
    pub bloch_period: f64,
    pub osc_amplitude: f64,
}

/// Snapshot of the current state. `theta_mean` is NaN when undefined;
/// `p_plus`/`p_minus` are NaN for scalar models.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct KdObservables {
    pub t: u64,
    pub p_mean: f64,
    pub p_spread: f64,
    pub theta_mean: f64,
    pub p_plus: f64,
    pub p_minus: f64,
}

#[derive(Clone)]
enum AnyState {
    Spinor(SpinorState),
    Scalar(ScalarState),
}

/// Opaque simulation handle.
pub struct KdSimulation {
    params: SimParams,
    grid: Grid,
    stepper: FloquetStepper,
    state: AnyState,
    t: u64,
    theta_prev: Cell<f64>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let clean = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = clean);
}

fn fail(status: KdStatus, msg: impl AsRef<str>) -> KdStatus {
    set_error(msg.as_ref());
    status
}

fn from_error(e: Error) -> KdStatus {
    let status = match e {
        Error::Config(_) => KdStatus::Config,
        Error::NoCrossing { .. } | Error::DegenerateSweep { .. } => KdStatus::NoCrossing,
        Error::Contract(_) => KdStatus::InvalidArgument,
        _ => KdStatus::Internal,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> Result<(), KdStatus>) -> KdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            KdStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(KdStatus::Panic, format!("internal panic: {msg}"))
        }
    }
}

fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, KdStatus> {
    // SAFETY: the caller promises `p` is null or valid for reads.
    unsafe { p.as_ref() }.ok_or_else(|| fail(KdStatus::NullPointer, format!("{what} is null")))
}

fn deref_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, KdStatus> {
    // SAFETY: the caller promises `p` is null or valid and unaliased.
    unsafe { p.as_mut() }.ok_or_else(|| fail(KdStatus::NullPointer, format!("{what} is null")))
}

fn build(params: &KdParams, gaussian: &KdGaussian) -> kicked_dirac::Result<KdSimulation> {
    let model = model_from_raw(params.model)
        .ok_or_else(|| Error::Config(format!("unknown model code {}", params.model)))?;
    let params = SimParams {
        alpha: params.alpha,
        mass: params.mass,
        kick: params.kick,
        period: params.period,
        n_modes: params.n_modes,
        model,
    };
    params.validate()?;
    let grid = Grid::new(params.n_modes)?;
    let spec = GaussianSpec {
        p0: gaussian.p0,
        delta_p: gaussian.delta_p,
        chi: [
            Complex64::new(gaussian.chi_re[0], gaussian.chi_im[0]),
            Complex64::new(gaussian.chi_re[1], gaussian.chi_im[1]),
        ],
    };
    let state = if params.model.is_spinor() {
        AnyState::Spinor(make_gaussian_spinor(&spec, &grid)?)
    } else {
        AnyState::Scalar(make_gaussian_scalar(&spec, &grid)?)
    };
    Ok(KdSimulation {
        stepper: FloquetStepper::new(&params, &grid)?,
        params,
        grid,
        state,
        t: 0,
        theta_prev: Cell::new(0.0),
    })
}

/// Creates a simulation at `t = 0`. On success `*out` owns a new handle.
///
/// # Safety
/// `params` and `gaussian` must be valid for reads; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kd_simulation_new(
    params: *const KdParams,
    gaussian: *const KdGaussian,
    out: *mut *mut KdSimulation,
) -> KdStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        *out = ptr::null_mut();
        let sim = build(deref(params, "params")?, deref(gaussian, "gaussian")?).map_err(from_error)?;
        *out = Box::into_raw(Box::new(sim));
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `sim` must be null or a handle from [`kd_simulation_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kd_simulation_free(sim: *mut KdSimulation) {
    if !sim.is_null() {
        // SAFETY: ownership returns to Rust exactly once per the contract above.
        let _ = catch_unwind(AssertUnwindSafe(|| drop(unsafe { Box::from_raw(sim) })));
    }
}

fn advance(sim: &mut KdSimulation, n_kicks: u64, inverse: bool) -> Result<(), KdStatus> {
    if inverse && n_kicks > sim.t {
        return Err(fail(
            KdStatus::InvalidArgument,
            format!("cannot undo {n_kicks} kicks at t = {}", sim.t),
        ));
    }
    for _ in 0..n_kicks {
        let r = match (&mut sim.state, inverse) {
            (AnyState::Spinor(s), false) => sim.stepper.step(s),
            (AnyState::Spinor(s), true) => sim.stepper.step_inverse(s),
            (AnyState::Scalar(s), false) => sim.stepper.step(s),
            (AnyState::Scalar(s), true) => sim.stepper.step_inverse(s),
        };
        r.map_err(from_error)?;
    }
    sim.t = if inverse { sim.t - n_kicks } else { sim.t + n_kicks };
    Ok(())
}

/// Applies `n_kicks` Floquet periods.
///
/// # Safety
/// `sim` must be a live handle not used concurrently from another thread.
#[no_mangle]
pub unsafe extern "C" fn kd_simulation_step(sim: *mut KdSimulation, n_kicks: u64) -> KdStatus {
    guard(|| advance(deref_mut(sim, "sim")?, n_kicks, false))
}

/// Undoes `n_kicks` periods; fails if that would go below `t = 0`.
///
/// # Safety
/// As for [`kd_simulation_step`].
#[no_mangle]
pub unsafe extern "C" fn kd_simulation_step_inverse(sim: *mut KdSimulation, n_kicks: u64) -> KdStatus {
    guard(|| advance(deref_mut(sim, "sim")?, n_kicks, true))
}

/// Measures the current state. The θ mean is unwrapped against the value
/// returned by the previous call on this handle.
///
/// # Safety
/// `sim` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kd_simulation_observables(sim: *const KdSimulation, out: *mut KdObservables) -> KdStatus {
    guard(|| {
        let sim = deref(sim, "sim")?;
        let out = deref_mut(out, "out")?;
        let t = sim.t as usize;
        let prev = sim.theta_prev.get();
        let rec = match &sim.state {
            AnyState::Spinor(s) => ObservableRecord::measure(t, s, &sim.params, &sim.grid, prev, false),
            AnyState::Scalar(s) => ObservableRecord::measure(t, s, &sim.params, &sim.grid, prev, false),
        }
        .map_err(from_error)?;
        if let Some(theta) = rec.theta_mean {
            sim.theta_prev.set(theta);
        }
        let (p_plus, p_minus) = rec.bands.unwrap_or((f64::NAN, f64::NAN));
        *out = KdObservables {
            t: sim.t,
            p_mean: rec.p_mean,
            p_spread: rec.p_spread,
            theta_mean: rec.theta_mean.unwrap_or(f64::NAN),
            p_plus,
            p_minus,
        };
        Ok(())
    })
}

/// Number of momentum modes of the handle (0 for null).
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kd_simulation_n_modes(sim: *const KdSimulation) -> usize {
    // SAFETY: per the contract above.
    unsafe { sim.as_ref() }.map_or(0, |s| s.grid.n_modes())
}

/// Writes the momentum density for `p = −N/2 … N/2 − 1` into `out[0..N]`.
///
/// # Safety
/// `sim` must be a live handle; `out` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn kd_simulation_momentum_density(sim: *const KdSimulation, out: *mut f64, len: usize) -> KdStatus {
    guard(|| {
        let sim = deref(sim, "sim")?;
        let n = sim.grid.n_modes();
        if out.is_null() {
            return Err(fail(KdStatus::NullPointer, "out is null"));
        }
        if len < n {
            return Err(fail(KdStatus::BufferTooSmall, format!("need {n} doubles, got {len}")));
        }
        let density = match &sim.state {
            AnyState::Spinor(s) => s.density(),
            AnyState::Scalar(s) => s.density(),
        };
        // SAFETY: `out` is non-null and valid for `len ≥ n` writes.
        let dst = unsafe { std::slice::from_raw_parts_mut(out, n) };
        dst.copy_from_slice(&sim.grid.momentum_to_physical(&density));
        Ok(())
    })
}

/// Drive amplitude, phase shift and Bloch period of the averaged dynamics.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kd_effective_params(kick: f64, period: f64, alpha: f64, out: *mut KdEffectiveParams) -> KdStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        if !(alpha > 0.0 && period > 0.0 && kick.is_finite()) {
            return Err(fail(KdStatus::InvalidArgument, "need alpha > 0, period > 0 and finite kick"));
        }
        let ep = analytics::effective_params(kick, period, alpha);
        *out = KdEffectiveParams {
            amplitude: ep.amplitude,
            phase_shift: ep.phase_shift,
            bloch_period: ep.bloch_period,
            osc_amplitude: ep.osc_amplitude,
        };
        Ok(())
    })
}

/// Both times at which the packet-center orbit from `p0` crosses `p = 0`.
/// Returns [`KdStatus::NoCrossing`] when it never does.
///
/// # Safety
/// `t1` and `t2` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kd_crossing_time(
    p0: f64,
    kick: f64,
    period: f64,
    alpha: f64,
    t1: *mut f64,
    t2: *mut f64,
) -> KdStatus {
    guard(|| {
        let t1 = deref_mut(t1, "t1")?;
        let t2 = deref_mut(t2, "t2")?;
        if !(alpha > 0.0 && period > 0.0) {
            return Err(fail(KdStatus::InvalidArgument, "need alpha > 0 and period > 0"));
        }
        let ep = analytics::effective_params(kick, period, alpha);
        match analytics::crossing_time(p0, &ep, alpha) {
            Crossing::At { first, second } => {
                *t1 = first;
                *t2 = second;
                Ok(())
            }
            Crossing::Never { argument } => Err(from_error(Error::NoCrossing { argument })),
        }
    })
}

/// Single-passage tunneling probability into the upper band.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kd_lz_probability(
    mass: f64,
    alpha: f64,
    kick: f64,
    period: f64,
    p0: f64,
    out: *mut f64,
) -> KdStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        *out = analytics::lz_probability(mass, alpha, kick, period, p0).map_err(from_error)?;
        Ok(())
    })
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn kd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn kd_version() -> *const c_char {
    const VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}
