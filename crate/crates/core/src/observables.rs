//! Measurements on states: momentum moments, densities, the circular
//! coordinate mean and instantaneous band occupations.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{momentum_of_bin, Grid};
use crate::models::SimParams;
use crate::state::{band_eigenvector, Band, Representation, SpinorState, WaveFunction};

/// Resultant length below which the circular mean is undefined.
pub const MIN_RESULTANT: f64 = 1e-6;

/// One row of an observable time series.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableRecord {
    /// Number of Floquet steps applied.
    pub t: usize,
    pub p_mean: f64,
    /// Second moment `⟨p²⟩`.
    pub p_spread: f64,
    /// Continuity-unwrapped circular mean of θ; `None` when undefined.
    pub theta_mean: Option<f64>,
    /// `(P₊, P₋)` for spinor states.
    pub bands: Option<(f64, f64)>,
    /// Ascending-momentum density, when requested.
    pub momentum_density: Option<Vec<f64>>,
    /// Ascending-θ density, when requested.
    pub coordinate_density: Option<Vec<f64>>,
}

impl ObservableRecord {
    /// Measures a momentum-representation state. `theta_prev` is the previous
    /// unwrapped θ mean.
    pub fn measure<S: WaveFunction>(
        t: usize,
        state: &S,
        params: &SimParams,
        grid: &Grid,
        theta_prev: f64,
        with_densities: bool,
    ) -> Result<Self> {
        let (p_mean, p_spread) = momentum_moments(state)?;
        let coordinate = state.in_representation(Representation::Coordinate, grid)?;
        let theta_mean = match circular_mean_theta(&coordinate, grid, theta_prev) {
            Ok(theta) => Some(theta),
            Err(Error::UndefinedMean { .. }) => None,
            Err(e) => return Err(e),
        };
        let bands = match state.as_spinor() {
            Some(spinor) => Some(band_occupations(spinor, params)?),
            None => None,
        };
        let (momentum_density, coordinate_density) = if with_densities {
            (
                Some(grid.momentum_to_physical(&state.density())),
                Some(grid.coordinate_to_physical(&coordinate.density())),
            )
        } else {
            (None, None)
        };
        Ok(Self {
            t,
            p_mean,
            p_spread,
            theta_mean,
            bands,
            momentum_density,
            coordinate_density,
        })
    }
}

/// Recorded time series plus run diagnostics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObservableSeries {
    pub records: Vec<ObservableRecord>,
    /// Set when probability reached the momentum-grid edges.
    pub tainted: bool,
    pub warnings: Vec<String>,
}

impl ObservableSeries {
    pub(crate) fn note(&mut self, warning: String) {
        self.warnings.push(warning);
    }

    pub fn times(&self) -> Vec<usize> {
        self.records.iter().map(|r| r.t).collect()
    }

    pub fn p_mean(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.p_mean).collect()
    }

    pub fn p_spread(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.p_spread).collect()
    }

    /// `P₊(t)`; NaN for scalar runs.
    pub fn band_plus(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.bands.map_or(f64::NAN, |b| b.0)).collect()
    }
}

/// `(⟨p⟩, ⟨p²⟩)` of a momentum-representation state.
pub fn momentum_moments<S: WaveFunction>(state: &S) -> Result<(f64, f64)> {
    state.expect_representation(Representation::Momentum)?;
    let n = state.n_modes();
    let (mut first, mut second) = (0.0, 0.0);
    for (k, rho) in state.density().into_iter().enumerate() {
        let p = momentum_of_bin(k, n) as f64;
        first += p * rho;
        second += p * p * rho;
    }
    Ok((first, second))
}

/// Weights `(P₊, P₋)` in the instantaneous eigenbands of `2παp σx + M σz`.
pub fn band_occupations(state: &SpinorState, params: &SimParams) -> Result<(f64, f64)> {
    state.expect_representation(Representation::Momentum)?;
    let n = state.n_modes();
    let (mut plus, mut minus) = (0.0, 0.0);
    for (k, (u, d)) in state.up().iter().zip(state.down()).enumerate() {
        if u.norm_sqr() + d.norm_sqr() == 0.0 {
            continue;
        }
        let a = params.coupling(momentum_of_bin(k, n));
        let vp = band_eigenvector(a, params.mass, Band::Plus);
        let vm = band_eigenvector(a, params.mass, Band::Minus);
        plus += (u * vp[0] + d * vp[1]).norm_sqr();
        minus += (u * vm[0] + d * vm[1]).norm_sqr();
    }
    Ok((plus, minus))
}

/// Circular mean `arg Σ ρ(θ) e^{iθ}`, shifted by the multiple of 2π that
/// lands closest to `previous_unwrapped`.
pub fn circular_mean_theta<S: WaveFunction>(state: &S, grid: &Grid, previous_unwrapped: f64) -> Result<f64> {
    state.expect_representation(Representation::Coordinate)?;
    let resultant: Complex64 = state
        .density()
        .into_iter()
        .zip(grid.bin_thetas())
        .map(|(rho, theta)| Complex64::from_polar(rho, theta))
        .sum();
    let length = resultant.norm();
    if length < MIN_RESULTANT {
        return Err(Error::UndefinedMean { resultant: length });
    }
    let raw = resultant.arg();
    let turns = ((previous_unwrapped - raw) / (2.0 * PI)).round();
    Ok(raw + 2.0 * PI * turns)
}

/// `(momentum density, coordinate density)` in ascending-p and ascending-θ order.
pub fn densities<S: WaveFunction>(state: &S, grid: &Grid) -> Result<(Vec<f64>, Vec<f64>)> {
    let momentum = state.in_representation(Representation::Momentum, grid)?;
    let coordinate = state.in_representation(Representation::Coordinate, grid)?;
    Ok((
        grid.momentum_to_physical(&momentum.density()),
        grid.coordinate_to_physical(&coordinate.density()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::models::Model;
    use crate::state::{
        chi_x_plus, make_band_projected_spinor, make_gaussian_spinor, GaussianSpec, ScalarState,
    };
    use approx::assert_abs_diff_eq;

    fn spinor_params(mass: f64, n: usize) -> SimParams {
        SimParams {
            mass,
            n_modes: n,
            ..SimParams::new(Model::DiracSpinor)
        }
    }

    fn scalar_at(grid: &Grid, weights: &[(i64, f64)]) -> ScalarState {
        let mut amp = vec![Complex64::default(); grid.n_modes()];
        for &(p, w) in weights {
            amp[grid.momentum_bin(p).unwrap()] = Complex64::new(w.sqrt(), 0.0);
        }
        ScalarState::from_parts(amp, Representation::Momentum)
    }

    #[test]
    fn moments_of_simple_states() {
        let grid = make_grid(32).unwrap();
        assert_eq!(momentum_moments(&scalar_at(&grid, &[(3, 1.0)])).unwrap(), (3.0, 9.0));
        let sym = scalar_at(&grid, &[(-5, 0.25), (5, 0.25), (-2, 0.25), (2, 0.25)]);
        let (m, s) = momentum_moments(&sym).unwrap();
        assert_eq!(m, 0.0);
        assert_abs_diff_eq!(s, 14.5, epsilon = 1e-14);
    }

    #[test]
    fn moments_of_reference_packet() {
        let grid = make_grid(4096).unwrap();
        let s = make_gaussian_spinor(&GaussianSpec::default(), &grid).unwrap();
        let (mean, spread) = momentum_moments(&s).unwrap();
        // Direct summation over ρ_p ∝ exp(−(p+50)²/16).
        let w: Vec<(f64, f64)> = (-2048..2048)
            .map(|p| (p as f64, (-(p as f64 + 50.0).powi(2) / 16.0).exp()))
            .collect();
        let z: f64 = w.iter().map(|x| x.1).sum();
        let m1: f64 = w.iter().map(|x| x.0 * x.1).sum::<f64>() / z;
        let m2: f64 = w.iter().map(|x| x.0 * x.0 * x.1).sum::<f64>() / z;
        assert_abs_diff_eq!(mean, m1, epsilon = 1e-9);
        assert_abs_diff_eq!(spread, m2, epsilon = 1e-7);
        // Variance of the discretised density is Δp²/2 = 8.
        assert_abs_diff_eq!(m2 - m1 * m1, 8.0, epsilon = 1e-6);
        assert!(momentum_moments(&s.in_representation(Representation::Coordinate, &grid).unwrap()).is_err());
    }

    #[test]
    fn band_projection_is_pure() {
        let grid = make_grid(512).unwrap();
        let params = spinor_params(0.1, 512);
        let spec = GaussianSpec { p0: -21.0, ..Default::default() };
        for band in [Band::Plus, Band::Minus] {
            let s = make_band_projected_spinor(&spec, &params, band, &grid).unwrap();
            let (p, m) = band_occupations(&s, &params).unwrap();
            let (want_p, want_m) = if band == Band::Plus { (1.0, 0.0) } else { (0.0, 1.0) };
            assert_abs_diff_eq!(p, want_p, epsilon = 1e-12);
            assert_abs_diff_eq!(m, want_m, epsilon = 1e-12);

            let envelope = make_gaussian_spinor(&spec, &grid).unwrap();
            let a = momentum_moments(&s).unwrap();
            let b = momentum_moments(&envelope).unwrap();
            assert_abs_diff_eq!(a.0, b.0, epsilon = 1e-12);
            assert_abs_diff_eq!(a.1, b.1, epsilon = 1e-12);
        }
    }

    #[test]
    fn massless_positive_packet_sits_in_upper_band() {
        let grid = make_grid(512).unwrap();
        let params = spinor_params(0.0, 512);
        let spec = GaussianSpec { p0: 40.0, delta_p: 4.0, chi: chi_x_plus() };
        let s = make_gaussian_spinor(&spec, &grid).unwrap();
        let (p, m) = band_occupations(&s, &params).unwrap();
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn occupations_ignore_global_phase() {
        let grid = make_grid(256).unwrap();
        let params = spinor_params(0.3, 256);
        let chi = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let s = make_gaussian_spinor(&GaussianSpec { p0: 3.0, delta_p: 5.0, chi }, &grid).unwrap();
        let phase = Complex64::from_polar(1.0, 1.234);
        let rotated = SpinorState::from_parts(
            s.up().iter().map(|z| z * phase).collect(),
            s.down().iter().map(|z| z * phase).collect(),
            Representation::Momentum,
        )
        .unwrap();
        let a = band_occupations(&s, &params).unwrap();
        let b = band_occupations(&rotated, &params).unwrap();
        assert_abs_diff_eq!(a.0, b.0, epsilon = 1e-14);
        assert_abs_diff_eq!(a.0 + a.1, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn circular_mean_cases() {
        let grid = make_grid(64).unwrap();
        let mut amp = vec![Complex64::default(); 64];
        let site = 40; // θ = −π + 2π·40/64 = π/4
        amp[grid.site_bin(site)] = Complex64::new(1.0, 0.0);
        let s = ScalarState::from_parts(amp, Representation::Coordinate);
        assert_abs_diff_eq!(circular_mean_theta(&s, &grid, 0.0).unwrap(), PI / 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            circular_mean_theta(&s, &grid, 6.0).unwrap(),
            PI / 4.0 + 2.0 * PI,
            epsilon = 1e-14
        );

        let mut amp = vec![Complex64::default(); 64];
        let r = std::f64::consts::FRAC_1_SQRT_2;
        amp[grid.site_bin(16)] = Complex64::new(r, 0.0); // −π/2
        amp[grid.site_bin(48)] = Complex64::new(r, 0.0); // +π/2
        let s = ScalarState::from_parts(amp, Representation::Coordinate);
        assert!(matches!(circular_mean_theta(&s, &grid, 0.0), Err(Error::UndefinedMean { .. })));
    }

    #[test]
    fn densities_of_single_mode() {
        let grid = make_grid(32).unwrap();
        let s = scalar_at(&grid, &[(3, 1.0)]);
        let (p, theta) = densities(&s, &grid).unwrap();
        assert_eq!(p.iter().position(|&x| x > 0.5), Some(16 + 3));
        for x in &theta {
            assert_abs_diff_eq!(*x, 1.0 / 32.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(theta.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn gaussian_density_shape() {
        let grid = make_grid(256).unwrap();
        let s = make_gaussian_spinor(&GaussianSpec { p0: 10.0, delta_p: 4.0, chi: chi_x_plus() }, &grid).unwrap();
        let (p, theta) = densities(&s, &grid).unwrap();
        let peak = p.iter().cloned().fold(0.0, f64::max);
        assert_eq!(grid.p_values()[p.iter().position(|&x| x == peak).unwrap()], 10);
        // ρ(p0 ± Δp) / ρ(p0) = e^{-1}
        let at = |q: i64| p[(q + 128) as usize];
        assert_abs_diff_eq!(at(14) / at(10), (-1.0f64).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(theta.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }
}
