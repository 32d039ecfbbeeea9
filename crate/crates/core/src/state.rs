//! Initial wave packets and the evolving spinor / scalar states.
//!
//! Buffers are stored in the bin order described in [`crate::grid`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::models::SimParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    Momentum,
    Coordinate,
}

/// Instantaneous energy band of the two-level Hamiltonian `2παp σx + M σz`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    Plus,
    Minus,
}

/// Shared behaviour of spinor and scalar wave functions.
pub trait WaveFunction: Clone + Send + Sync {
    fn representation(&self) -> Representation;

    fn n_modes(&self) -> usize;

    fn components(&self) -> Vec<&[Complex64]>;

    fn components_mut(&mut self) -> Vec<&mut [Complex64]>;

    #[doc(hidden)]
    fn set_representation(&mut self, repr: Representation);

    /// `(up, down)` for spinors.
    fn spinor_parts_mut(&mut self) -> Option<(&mut [Complex64], &mut [Complex64])> {
        None
    }

    fn as_spinor(&self) -> Option<&SpinorState> {
        None
    }

    fn norm_sqr(&self) -> f64 {
        self.components()
            .iter()
            .flat_map(|c| c.iter())
            .map(|z| z.norm_sqr())
            .sum()
    }

    /// Total density per bin, summed over components, in the current representation.
    fn density(&self) -> Vec<f64> {
        let mut rho = vec![0.0; self.n_modes()];
        for comp in self.components() {
            for (r, z) in rho.iter_mut().zip(comp) {
                *r += z.norm_sqr();
            }
        }
        rho
    }

    fn expect_representation(&self, repr: Representation) -> Result<()> {
        if self.representation() != repr {
            return Err(Error::contract(format!(
                "state is in {:?} representation, expected {repr:?}",
                self.representation()
            )));
        }
        Ok(())
    }

    /// Transforms in place to `target`; a no-op when already there.
    fn switch_to(&mut self, target: Representation, grid: &Grid) -> Result<()> {
        if self.n_modes() != grid.n_modes() {
            return Err(Error::contract(format!(
                "state has {} modes, grid has {}",
                self.n_modes(),
                grid.n_modes()
            )));
        }
        if self.representation() == target {
            return Ok(());
        }
        for comp in self.components_mut() {
            match target {
                Representation::Coordinate => grid.to_coordinate_in_place(comp)?,
                Representation::Momentum => grid.to_momentum_in_place(comp)?,
            }
        }
        self.set_representation(target);
        Ok(())
    }

    /// Returns a copy in `target` representation, leaving `self` untouched.
    fn in_representation(&self, target: Representation, grid: &Grid) -> Result<Self> {
        let mut copy = self.clone();
        copy.switch_to(target, grid)?;
        Ok(copy)
    }
}

/// Two complex amplitudes per lattice site.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorState {
    up: Vec<Complex64>,
    down: Vec<Complex64>,
    representation: Representation,
}

impl SpinorState {
    pub fn from_parts(up: Vec<Complex64>, down: Vec<Complex64>, representation: Representation) -> Result<Self> {
        if up.len() != down.len() {
            return Err(Error::contract(format!(
                "spinor components differ in length ({} vs {})",
                up.len(),
                down.len()
            )));
        }
        Ok(Self {
            up,
            down,
            representation,
        })
    }

    pub fn up(&self) -> &[Complex64] {
        &self.up
    }

    pub fn down(&self) -> &[Complex64] {
        &self.down
    }
}

impl WaveFunction for SpinorState {
    fn representation(&self) -> Representation {
        self.representation
    }

    fn n_modes(&self) -> usize {
        self.up.len()
    }

    fn components(&self) -> Vec<&[Complex64]> {
        vec![&self.up, &self.down]
    }

    fn components_mut(&mut self) -> Vec<&mut [Complex64]> {
        vec![&mut self.up, &mut self.down]
    }

    fn set_representation(&mut self, repr: Representation) {
        self.representation = repr;
    }

    fn spinor_parts_mut(&mut self) -> Option<(&mut [Complex64], &mut [Complex64])> {
        Some((&mut self.up, &mut self.down))
    }

    fn as_spinor(&self) -> Option<&SpinorState> {
        Some(self)
    }
}

/// One complex amplitude per lattice site.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarState {
    amp: Vec<Complex64>,
    representation: Representation,
}

impl ScalarState {
    pub fn from_parts(amp: Vec<Complex64>, representation: Representation) -> Self {
        Self { amp, representation }
    }

    pub fn amp(&self) -> &[Complex64] {
        &self.amp
    }
}

impl WaveFunction for ScalarState {
    fn representation(&self) -> Representation {
        self.representation
    }

    fn n_modes(&self) -> usize {
        self.amp.len()
    }

    fn components(&self) -> Vec<&[Complex64]> {
        vec![&self.amp]
    }

    fn components_mut(&mut self) -> Vec<&mut [Complex64]> {
        vec![&mut self.amp]
    }

    fn set_representation(&mut self, repr: Representation) {
        self.representation = repr;
    }
}

/// Gaussian momentum envelope `exp[−(p−p0)²/(2Δp²)]` tensored with spin `chi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub p0: f64,
    pub delta_p: f64,
    /// Spin state as `[[re, im], [re, im]]`.
    #[serde(with = "chi_serde")]
    pub chi: [Complex64; 2],
}

impl Default for GaussianSpec {
    fn default() -> Self {
        Self {
            p0: -50.0,
            delta_p: 4.0,
            chi: chi_x_plus(),
        }
    }
}

/// `(1, 1)/√2`, the `+1` eigenspinor of σx.
pub fn chi_x_plus() -> [Complex64; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [Complex64::new(s, 0.0), Complex64::new(s, 0.0)]
}

pub fn chi_up() -> [Complex64; 2] {
    [Complex64::new(1.0, 0.0), Complex64::default()]
}

mod chi_serde {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(chi: &[Complex64; 2], s: S) -> Result<S::Ok, S::Error> {
        [[chi[0].re, chi[0].im], [chi[1].re, chi[1].im]].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[Complex64; 2], D::Error> {
        let raw = <[[f64; 2]; 2]>::deserialize(d)?;
        Ok([Complex64::new(raw[0][0], raw[0][1]), Complex64::new(raw[1][0], raw[1][1])])
    }
}

impl GaussianSpec {
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        if !(self.p0.is_finite() && self.delta_p.is_finite()) || self.delta_p <= 0.0 {
            return Err(Error::config(format!(
                "packet needs finite p0 and positive width, got p0 = {}, delta_p = {}",
                self.p0, self.delta_p
            )));
        }
        let chi_norm = self.chi[0].norm_sqr() + self.chi[1].norm_sqr();
        if (chi_norm - 1.0).abs() > 1e-12 {
            return Err(Error::config(format!("spin state must have unit norm, |chi|^2 = {chi_norm}")));
        }
        let half = (grid.n_modes() / 2) as f64;
        if self.p0.abs() + 5.0 * self.delta_p >= half {
            return Err(Error::config(format!(
                "packet |p0| + 5 delta_p = {} does not fit inside the momentum grid (N/2 = {half})",
                self.p0.abs() + 5.0 * self.delta_p
            )));
        }
        Ok(())
    }

    /// Normalised envelope weights in bin order.
    fn envelope(&self, grid: &Grid) -> Vec<f64> {
        let w = 2.0 * self.delta_p * self.delta_p;
        let mut g: Vec<f64> = grid
            .bin_momenta()
            .map(|p| {
                let d = p as f64 - self.p0;
                (-d * d / w).exp()
            })
            .collect();
        let total = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        g.iter_mut().for_each(|x| *x /= total);
        g
    }
}

pub fn make_gaussian_spinor(spec: &GaussianSpec, grid: &Grid) -> Result<SpinorState> {
    spec.validate(grid)?;
    let g = spec.envelope(grid);
    let up = g.iter().map(|&x| spec.chi[0] * x).collect();
    let down = g.iter().map(|&x| spec.chi[1] * x).collect();
    SpinorState::from_parts(up, down, Representation::Momentum)
}

/// Scalar packet with the same envelope; the spin part of `spec` is ignored.
pub fn make_gaussian_scalar(spec: &GaussianSpec, grid: &Grid) -> Result<ScalarState> {
    let spec = GaussianSpec {
        chi: chi_up(),
        ..*spec
    };
    spec.validate(grid)?;
    let amp = spec.envelope(grid).into_iter().map(|x| Complex64::new(x, 0.0)).collect();
    Ok(ScalarState::from_parts(amp, Representation::Momentum))
}

/// Gaussian envelope whose spinor at every `p` is the chosen band eigenvector.
pub fn make_band_projected_spinor(
    spec: &GaussianSpec,
    params: &SimParams,
    band: Band,
    grid: &Grid,
) -> Result<SpinorState> {
    spec.validate(grid)?;
    if !(params.mass >= 0.0) {
        return Err(Error::config(format!("mass must be non-negative, got {}", params.mass)));
    }
    let g = spec.envelope(grid);
    let (up, down) = grid
        .bin_momenta()
        .zip(&g)
        .map(|(p, &x)| {
            let v = band_eigenvector(params.coupling(p), params.mass, band);
            (Complex64::new(v[0] * x, 0.0), Complex64::new(v[1] * x, 0.0))
        })
        .unzip();
    SpinorState::from_parts(up, down, Representation::Momentum)
}

/// Normalised real eigenvector of `[[M, a], [a, −M]]` with `a = 2παp`.
///
/// The eigenvalue is `±√(a² + M²)`. Phase convention: first nonzero
/// component positive. At `a = 0, M > 0` this is `(1, 0)` / `(0, 1)`;
/// at `a = M = 0` the `+` band is `(1, 1)/√2`, continuous with `a > 0`.
pub fn band_eigenvector(coupling: f64, mass: f64, band: Band) -> [f64; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = if coupling == 0.0 && mass == 0.0 {
        [s, s]
    } else {
        // (M + E, a) never vanishes here, and avoids cancellation in M − E.
        let e = coupling.hypot(mass);
        let x = mass + e;
        let n = x.hypot(coupling);
        [x / n, coupling / n]
    };
    match band {
        Band::Plus => plus,
        Band::Minus => {
            let v = [-plus[1], plus[0]];
            if v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0) {
                [-v[0], -v[1]]
            } else {
                v
            }
        }
    }
}
