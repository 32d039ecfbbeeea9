//! Angular grid, integer momentum lattice and the transforms between them.
//!
//! Convention: `ψ(θ_j) = N^{-1/2} Σ_p c_p e^{+ipθ_j}` with `θ_j = −π + 2πj/N`
//! and `p ∈ {−N/2, …, N/2−1}`.
//!
//! Amplitude buffers are kept in the natural bin order of the FFT in *both*
//! representations. Momentum bin `k` holds `p = k` for `k < N/2` and
//! `p = k − N` otherwise. Coordinate bin `m` holds the angle `2πm/N` folded
//! into `[−π, π)`, i.e. physical site `j = (m + N/2) mod N`. With that
//! pairing the transform above is exactly an unnormalised inverse DFT scaled
//! by `N^{-1/2}`, so no per-step reordering or sign twiddles are needed. Use
//! [`Grid::momentum_bin`], [`Grid::momentum_of_bin`], [`Grid::site_bin`] and
//! [`Grid::theta_of_bin`] to move between bins and physical labels.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Default basis size.
pub const DEFAULT_MODES: usize = 4096;

#[derive(Clone)]
pub struct Grid {
    n_modes: usize,
    theta: Vec<f64>,
    p_values: Vec<i64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scale: f64,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("n_modes", &self.n_modes).finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n_modes == other.n_modes
    }
}

pub fn make_grid(n_modes: usize) -> Result<Grid> {
    Grid::new(n_modes)
}

/// Physical momentum stored in FFT bin `bin` of an `n`-mode buffer.
#[inline]
pub fn momentum_of_bin(bin: usize, n: usize) -> i64 {
    if bin < n / 2 {
        bin as i64
    } else {
        bin as i64 - n as i64
    }
}

impl Grid {
    pub fn new(n_modes: usize) -> Result<Self> {
        if n_modes < 4 || !n_modes.is_power_of_two() {
            return Err(Error::config(format!(
                "grid size must be a power of two and at least 4, got {n_modes}"
            )));
        }
        let n = n_modes as f64;
        let theta = (0..n_modes).map(|j| -PI + 2.0 * PI * j as f64 / n).collect();
        let half = (n_modes / 2) as i64;
        let p_values = (-half..half).collect();
        let mut planner = FftPlanner::new();
        Ok(Self {
            n_modes,
            theta,
            p_values,
            forward: planner.plan_fft_forward(n_modes),
            inverse: planner.plan_fft_inverse(n_modes),
            scale: 1.0 / n.sqrt(),
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Angles `θ_j` in physical (ascending) order.
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Momenta in physical (ascending) order.
    pub fn p_values(&self) -> &[i64] {
        &self.p_values
    }

    pub fn momentum_of_bin(&self, bin: usize) -> i64 {
        momentum_of_bin(bin, self.n_modes)
    }

    /// Buffer bin holding momentum `p`, if it lies on the lattice.
    pub fn momentum_bin(&self, p: i64) -> Option<usize> {
        let half = (self.n_modes / 2) as i64;
        if p < -half || p >= half {
            return None;
        }
        Some(p.rem_euclid(self.n_modes as i64) as usize)
    }

    /// Angle in `[−π, π)` held by coordinate bin `bin`.
    pub fn theta_of_bin(&self, bin: usize) -> f64 {
        self.theta[self.site_of_bin(bin)]
    }

    /// Physical site index `j` of coordinate bin `bin`.
    pub fn site_of_bin(&self, bin: usize) -> usize {
        (bin + self.n_modes / 2) % self.n_modes
    }

    /// Coordinate bin holding physical site `j`.
    pub fn site_bin(&self, site: usize) -> usize {
        (site + self.n_modes / 2) % self.n_modes
    }

    /// Momenta listed in bin order.
    pub fn bin_momenta(&self) -> impl ExactSizeIterator<Item = i64> + '_ {
        (0..self.n_modes).map(|k| self.momentum_of_bin(k))
    }

    /// Angles listed in bin order.
    pub fn bin_thetas(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_modes).map(|m| self.theta_of_bin(m))
    }

    /// Reorders a bin-ordered buffer into ascending momentum order.
    pub fn momentum_to_physical<T: Copy>(&self, bins: &[T]) -> Vec<T> {
        self.p_values
            .iter()
            .map(|&p| bins[p.rem_euclid(self.n_modes as i64) as usize])
            .collect()
    }

    /// Reorders a bin-ordered coordinate buffer into ascending θ order.
    pub fn coordinate_to_physical<T: Copy>(&self, bins: &[T]) -> Vec<T> {
        (0..self.n_modes).map(|j| bins[self.site_bin(j)]).collect()
    }

    /// Momentum amplitudes to coordinate amplitudes, in place.
    pub fn to_coordinate_in_place(&self, buf: &mut [Complex64]) -> Result<()> {
        self.check_len(buf.len())?;
        self.inverse.process(buf);
        buf.iter_mut().for_each(|z| *z *= self.scale);
        Ok(())
    }

    /// Coordinate amplitudes to momentum amplitudes, in place.
    pub fn to_momentum_in_place(&self, buf: &mut [Complex64]) -> Result<()> {
        self.check_len(buf.len())?;
        self.forward.process(buf);
        buf.iter_mut().for_each(|z| *z *= self.scale);
        Ok(())
    }

    /// Same as [`Grid::to_coordinate_in_place`] with caller-owned scratch.
    pub(crate) fn to_coordinate_with_scratch(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.inverse.process_with_scratch(buf, scratch);
        buf.iter_mut().for_each(|z| *z *= self.scale);
    }

    pub(crate) fn to_momentum_with_scratch(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.forward.process_with_scratch(buf, scratch);
        buf.iter_mut().for_each(|z| *z *= self.scale);
    }

    pub(crate) fn scratch_len(&self) -> usize {
        self.forward
            .get_inplace_scratch_len()
            .max(self.inverse.get_inplace_scratch_len())
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n_modes {
            return Err(Error::contract(format!(
                "buffer length {len} does not match grid size {}",
                self.n_modes
            )));
        }
        Ok(())
    }
}

/// `ψ(θ) = N^{-1/2} Σ_p c_p e^{ipθ}`; input and output are in bin order.
pub fn to_coordinate(momentum_amplitudes: &[Complex64], grid: &Grid) -> Result<Vec<Complex64>> {
    let mut out = momentum_amplitudes.to_vec();
    grid.to_coordinate_in_place(&mut out)?;
    Ok(out)
}

/// Exact inverse of [`to_coordinate`].
pub fn to_momentum(coordinate_amplitudes: &[Complex64], grid: &Grid) -> Result<Vec<Complex64>> {
    let mut out = coordinate_amplitudes.to_vec();
    grid.to_momentum_in_place(&mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn norm(v: &[Complex64]) -> f64 {
        v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Direct O(N²) evaluation of the momentum→coordinate sum over physical labels.
    fn direct_coordinate(grid: &Grid, c: &[Complex64]) -> Vec<Complex64> {
        let n = grid.n_modes();
        (0..n)
            .map(|m| {
                let theta = grid.theta_of_bin(m);
                (0..n)
                    .map(|k| c[k] * Complex64::from_polar(1.0, grid.momentum_of_bin(k) as f64 * theta))
                    .sum::<Complex64>()
                    / (n as f64).sqrt()
            })
            .collect()
    }

    #[test]
    fn small_grid_layout() {
        let g = make_grid(8).unwrap();
        let expected: Vec<f64> = (0..8).map(|j| -PI + j as f64 * PI / 4.0).collect();
        for (a, b) in g.theta().iter().zip(&expected) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-15);
        }
        assert_eq!(g.p_values(), &[-4, -3, -2, -1, 0, 1, 2, 3]);
        assert_eq!(g.bin_momenta().collect::<Vec<_>>(), vec![0, 1, 2, 3, -4, -3, -2, -1]);
        assert_eq!(g.theta_of_bin(0), 0.0);
        assert_abs_diff_eq!(g.theta_of_bin(4), -PI, epsilon = 1e-15);
        for p in -4..4 {
            assert_eq!(g.momentum_of_bin(g.momentum_bin(p).unwrap()), p);
        }
        assert_eq!(g.momentum_bin(4), None);
        for j in 0..8 {
            assert_eq!(g.site_of_bin(g.site_bin(j)), j);
        }
    }

    #[test]
    fn reference_sized_grid() {
        let g = make_grid(DEFAULT_MODES).unwrap();
        assert_eq!(g.n_modes(), 4096);
        assert_eq!(g.p_values().first(), Some(&-2048));
        assert_eq!(g.p_values().last(), Some(&2047));
        let dtheta = g.theta()[1] - g.theta()[0];
        assert_abs_diff_eq!(dtheta, 2.0 * PI / 4096.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_sizes() {
        for n in [0, 1, 2, 3, 6, 12, 100] {
            assert!(matches!(make_grid(n), Err(Error::Config(_))), "{n}");
        }
    }

    #[test]
    fn constant_and_plane_waves() {
        let g = make_grid(16).unwrap();
        let n = 16usize;
        let mut c = vec![Complex64::default(); n];
        c[g.momentum_bin(0).unwrap()] = Complex64::new(1.0, 0.0);
        for z in to_coordinate(&c, &g).unwrap() {
            assert_abs_diff_eq!(z.re, 0.25, epsilon = 1e-15);
            assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-15);
        }

        let mut c = vec![Complex64::default(); n];
        c[g.momentum_bin(1).unwrap()] = Complex64::new(1.0, 0.0);
        let psi = to_coordinate(&c, &g).unwrap();
        for (m, z) in psi.iter().enumerate() {
            let want = Complex64::from_polar(0.25, g.theta_of_bin(m));
            assert_abs_diff_eq!((z - want).norm(), 0.0, epsilon = 1e-15);
        }

        let psi: Vec<Complex64> = (0..n).map(|m| Complex64::from_polar(0.25, -g.theta_of_bin(m))).collect();
        let c = to_momentum(&psi, &g).unwrap();
        for (k, z) in c.iter().enumerate() {
            let want = if g.momentum_of_bin(k) == -1 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!((z - want).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn cosine_splits_onto_plus_minus_one() {
        let g = make_grid(32).unwrap();
        let psi: Vec<Complex64> = g.bin_thetas().map(|t| Complex64::new(t.cos(), 0.0)).collect();
        let c = to_momentum(&psi, &g).unwrap();
        // Direct DFT: Σ_j cos θ_j e^{-iθ_j}/√N = √N/2 at p = ±1, zero elsewhere.
        let half_root = (32f64).sqrt() / 2.0;
        for (k, z) in c.iter().enumerate() {
            let want = match g.momentum_of_bin(k) {
                1 | -1 => half_root,
                _ => 0.0,
            };
            assert_abs_diff_eq!((z - want).norm(), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn matches_direct_summation() {
        let g = make_grid(64).unwrap();
        let c: Vec<Complex64> = (0..64)
            .map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 1.3).cos()))
            .collect();
        let fast = to_coordinate(&c, &g).unwrap();
        let slow = direct_coordinate(&g, &c);
        for (a, b) in fast.iter().zip(&slow) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn spectral_derivative() {
        let g = make_grid(128).unwrap();
        for kmode in [-7i64, -1, 3, 20] {
            let c: Vec<Complex64> = g
                .bin_momenta()
                .map(|p| if p == kmode { Complex64::new(1.0, 0.0) } else { Complex64::default() })
                .collect();
            let dc: Vec<Complex64> = c.iter().zip(g.bin_momenta()).map(|(z, p)| z * p as f64).collect();
            let derived = to_coordinate(&dc, &g).unwrap();
            // −i ∂θ e^{ikθ}/√N = k e^{ikθ}/√N
            for (m, z) in derived.iter().enumerate() {
                let want = Complex64::from_polar(kmode as f64 / (128f64).sqrt(), kmode as f64 * g.theta_of_bin(m));
                assert_abs_diff_eq!((z - want).norm(), 0.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn length_mismatch() {
        let g = make_grid(8).unwrap();
        let v = vec![Complex64::default(); 7];
        assert!(matches!(to_coordinate(&v, &g), Err(Error::Contract(_))));
        assert!(matches!(to_momentum(&v, &g), Err(Error::Contract(_))));
    }

    #[test]
    fn physical_reordering() {
        let g = make_grid(8).unwrap();
        let bins: Vec<i64> = g.bin_momenta().collect();
        assert_eq!(g.momentum_to_physical(&bins), g.p_values());
        let thetas: Vec<f64> = g.bin_thetas().collect();
        assert_eq!(g.coordinate_to_physical(&thetas), g.theta());
    }

    fn amplitudes(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n)
            .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn round_trip_and_parseval(c in amplitudes(256)) {
            let g = make_grid(256).unwrap();
            let total = norm(&c);
            let c: Vec<Complex64> = c.iter().map(|z| z / total).collect();
            let psi = to_coordinate(&c, &g).unwrap();
            prop_assert!((norm(&psi) - 1.0).abs() <= 1e-12);
            let back = to_momentum(&psi, &g).unwrap();
            prop_assert!((norm(&back) - 1.0).abs() <= 1e-12);
            for (a, b) in back.iter().zip(&c) {
                prop_assert!((a - b).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn round_trip_largest_grid() {
        let n = 1 << 14;
        let g = make_grid(n).unwrap();
        let c: Vec<Complex64> = (0..n)
            .map(|k| Complex64::new(((k * 7919) % 113) as f64 / 113.0 - 0.5, ((k * 31) % 17) as f64 / 17.0 - 0.5))
            .collect();
        let total = norm(&c);
        let c: Vec<Complex64> = c.iter().map(|z| z / total).collect();
        let back = to_momentum(&to_coordinate(&c, &g).unwrap(), &g).unwrap();
        let worst = back.iter().zip(&c).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(worst <= 1e-12, "{worst}");
    }
}
