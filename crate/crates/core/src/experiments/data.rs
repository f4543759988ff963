//! Seeded initial data.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::grid::{Field, Grid1D};
use crate::norms::l2;

/// `a · e^{-x²/(2w²)} · e^{ikx}`.
pub fn gaussian(grid: &Grid1D, amplitude: f64, width: f64, wavenumber: f64) -> Result<Field> {
    if !(width.is_finite() && width > 0.0) {
        return Err(invalid("width", format!("{width} must be positive")));
    }
    Field::from_fn(grid, |x| {
        Complex64::from_polar(amplitude * (-x * x / (2.0 * width * width)).exp(), wavenumber * x)
    })
}

/// `a · e^{i 2π m x / L}`, periodic on the box.
pub fn plane_wave(grid: &Grid1D, amplitude: f64, mode: i64) -> Result<Field> {
    let k = 2.0 * PI * mode as f64 / grid.box_length();
    Field::from_fn(grid, |x| Complex64::from_polar(amplitude, k * x))
}

/// Random Gaussian-envelope field with `‖f‖_{L²} = amplitude`.
///
/// The profile is `Σ_{j≤3} c_j y^j e^{-y²/2} e^{ik₀x}` with `y = (x - x₀)/w`;
/// all parameters are drawn from ChaCha8 stream `stream` of `seed`, so the
/// same `(seed, stream)` yields the same function on every grid.
pub fn random_field(grid: &Grid1D, seed: u64, stream: u64, amplitude: f64) -> Result<Field> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let x0: f64 = rng.gen_range(-1.0..1.0);
    let w: f64 = rng.gen_range(0.7..1.3);
    let k0: f64 = rng.gen_range(-2.0..2.0);
    let coeffs: Vec<Complex64> = (0..4)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let raw = Field::from_fn(grid, |x| {
        let y = (x - x0) / w;
        let poly = coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * y + c);
        poly * Complex64::from_polar((-y * y / 2.0).exp(), k0 * x)
    })?;
    let norm = l2(&raw);
    Ok(if norm == 0.0 || amplitude == 0.0 {
        Field::zeros(grid)
    } else {
        &raw * (amplitude / norm)
    })
}

/// Random time profile used for inhomogeneous forcing:
/// `F(x, t) = g₁(x) e^{iωt} + g₂(x) t/T`.
pub(crate) fn random_forcing(
    grid: &Grid1D,
    seed: u64,
    stream: u64,
    horizon: f64,
    steps: usize,
) -> Result<crate::SpaceTimeField> {
    let g1 = random_field(grid, seed, 2 * stream, 1.0)?;
    let g2 = random_field(grid, seed, 2 * stream + 1, 1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_f0ce);
    rng.set_stream(stream);
    let omega: f64 = rng.gen_range(-3.0..3.0);
    crate::SpaceTimeField::from_fn(horizon, steps, |t| {
        &(&g1 * Complex64::from_polar(1.0, omega * t)) + &(&g2 * (t / horizon))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataKind {
    Gaussian,
    PlaneWave,
    Random,
}

/// Serializable recipe for initial data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataSpec {
    pub kind: DataKind,
    pub amplitude: f64,
    pub width: f64,
    /// Carrier wavenumber for Gaussians, integer box mode for plane waves.
    pub mode: f64,
    pub seed: u64,
}

impl Default for DataSpec {
    fn default() -> Self {
        Self {
            kind: DataKind::Gaussian,
            amplitude: 1.0,
            width: 1.0,
            mode: 0.0,
            seed: 42,
        }
    }
}

impl DataSpec {
    pub fn sample(&self, grid: &Grid1D) -> Result<Field> {
        if !self.amplitude.is_finite() {
            return Err(invalid("amplitude", "must be finite"));
        }
        match self.kind {
            DataKind::Gaussian => gaussian(grid, self.amplitude, self.width, self.mode),
            DataKind::PlaneWave => {
                if self.mode.fract() != 0.0 {
                    return Err(invalid("mode", format!("plane-wave mode {} must be an integer", self.mode)));
                }
                plane_wave(grid, self.amplitude, self.mode as i64)
            }
            DataKind::Random => random_field(grid, self.seed, 0, self.amplitude),
        }
    }
}
