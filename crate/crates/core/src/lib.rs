//! Spectral Floquet simulator for a periodically kicked spin-½ Dirac rotor
//! and its spinless, Maryland and non-relativistic reductions.
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`]: angular grid, integer momentum lattice and FFT transforms;
//! * [`state`]: Gaussian spinor/scalar packets and band-projected packets;
//! * [`models`]: one-kick Floquet steppers and the [`models::evolve`] driver;
//! * [`observables`]: moments, densities, circular θ mean, band occupations;
//! * [`analytics`]: closed-form Bloch trajectory and Landau-Zener predictions;
//! * [`runner`]: scenario configs, numeric tunneling measurement, sweeps, CSV.

pub mod analytics;
pub mod error;
pub mod grid;
pub mod models;
pub mod observables;
pub mod state;

pub use error::{Error, Result};
pub use grid::{make_grid, Grid};
pub use models::{evolve, FloquetStepper, Model, ObserverSelection, SimParams};
pub use state::{Band, GaussianSpec, Representation, ScalarState, SpinorState, WaveFunction};
pub mod runner;
