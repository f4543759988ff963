//! Periodic truncation of the real line and the sample containers living on it.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

struct FftPlans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// Uniform periodic grid on `[-L/2, L/2)`.
///
/// Node `j` sits at `x_j = -L/2 + j L / n`, so `j = n/2` is the origin.
/// Wavenumbers are stored in FFT order: index `k < n/2` carries `2πk/L`,
/// index `k >= n/2` carries `2π(k - n)/L`. The Nyquist mode is index `n/2`.
#[derive(Clone)]
pub struct Grid1D {
    n: usize,
    length: f64,
    plans: Arc<FftPlans>,
}

impl Grid1D {
    pub fn new(n_points: usize, box_length: f64) -> Result<Self> {
        if n_points < 16 || !n_points.is_power_of_two() {
            return Err(Error::BadGridSize(n_points));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::BadBoxLength(box_length));
        }
        let mut planner = FftPlanner::new();
        let plans = FftPlans {
            forward: planner.plan_fft_forward(n_points),
            inverse: planner.plan_fft_inverse(n_points),
        };
        Ok(Self {
            n: n_points,
            length: box_length,
            plans: Arc::new(plans),
        })
    }

    pub fn n_points(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Spacing of the discrete wavenumbers, `2π/L`.
    pub fn frequency_spacing(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn node(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Signed mode number of FFT index `k`, in `[-n/2, n/2)`.
    pub fn mode(&self, k: usize) -> i64 {
        if k < self.n / 2 {
            k as i64
        } else {
            k as i64 - self.n as i64
        }
    }

    pub fn wavenumber(&self, k: usize) -> f64 {
        self.mode(k) as f64 * self.frequency_spacing()
    }

    /// Wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.wavenumber(k)).collect()
    }

    pub fn nyquist_index(&self) -> usize {
        self.n / 2
    }

    /// Magnitude of the Nyquist wavenumber, `π n / L`.
    pub fn max_wavenumber(&self) -> f64 {
        PI * self.n as f64 / self.length
    }

    /// FFT index of signed mode `m`, if it is representable.
    pub fn index_of_mode(&self, m: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if m < -half || m >= half {
            None
        } else if m >= 0 {
            Some(m as usize)
        } else {
            Some((m + self.n as i64) as usize)
        }
    }

    pub(crate) fn fft_forward(&self, buf: &mut [Complex64]) {
        self.plans.forward.process(buf);
    }

    /// Unnormalised inverse FFT.
    pub(crate) fn fft_inverse(&self, buf: &mut [Complex64]) {
        self.plans.inverse.process(buf);
    }
}

impl PartialEq for Grid1D {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.length.to_bits() == other.length.to_bits()
    }
}

impl fmt::Debug for Grid1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid1D")
            .field("n_points", &self.n)
            .field("box_length", &self.length)
            .finish()
    }
}

/// Complex samples of a function at the nodes of a [`Grid1D`].
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: Grid1D,
    values: Vec<Complex64>,
}

fn first_non_finite(values: &[Complex64]) -> Option<usize> {
    values.iter().position(|z| !z.re.is_finite() || !z.im.is_finite())
}

impl Field {
    pub fn new(grid: &Grid1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::LengthMismatch {
                expected: grid.n_points(),
                got: values.len(),
            });
        }
        if let Some(j) = first_non_finite(&values) {
            return Err(Error::NonFinite(j));
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    pub fn zeros(grid: &Grid1D) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![Complex64::new(0.0, 0.0); grid.n_points()],
        }
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: &Grid1D, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(grid, grid.nodes().into_iter().map(f).collect())
    }

    pub(crate) fn from_raw(grid: &Grid1D, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.n_points());
        Self {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        first_non_finite(&self.values).is_none()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn same_grid(&self, other: &Field) -> bool {
        self.grid == other.grid
    }

    pub fn check_grid(&self, other: &Field) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Field {
        Field::from_raw(&self.grid, self.values.iter().map(|&z| f(z)).collect())
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_with(
        &self,
        other: &Field,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Field> {
        self.check_grid(other)?;
        Ok(Field::from_raw(
            &self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub fn conj(&self) -> Field {
        self.map(|z| z.conj())
    }

    pub fn abs_squared(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Cyclic shift by `cells` grid points (positive moves the profile right).
    pub fn shifted(&self, cells: isize) -> Field {
        let n = self.len() as isize;
        let s = cells.rem_euclid(n) as usize;
        let mut values = self.values.clone();
        values.rotate_right(s);
        Field::from_raw(&self.grid, values)
    }
}

impl Add for &Field {
    type Output = Field;

    /// Panics if the fields live on different grids.
    fn add(self, rhs: &Field) -> Field {
        self.zip_with(rhs, |a, b| a + b).expect("grid mismatch in Field + Field")
    }
}

impl Sub for &Field {
    type Output = Field;

    /// Panics if the fields live on different grids.
    fn sub(self, rhs: &Field) -> Field {
        self.zip_with(rhs, |a, b| a - b).expect("grid mismatch in Field - Field")
    }
}

impl Mul<f64> for &Field {
    type Output = Field;

    fn mul(self, rhs: f64) -> Field {
        self.map(|z| z * rhs)
    }
}

impl Mul<Complex64> for &Field {
    type Output = Field;

    fn mul(self, rhs: Complex64) -> Field {
        self.map(|z| z * rhs)
    }
}

/// Fourier coefficients `f̂(ξ_k)` in FFT order, normalised so that the
/// discrete Plancherel identity `‖f‖² = (1/2π) Σ |f̂_k|² Δξ` holds exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    grid: Grid1D,
    coefficients: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: &Grid1D, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != grid.n_points() {
            return Err(Error::LengthMismatch {
                expected: grid.n_points(),
                got: coefficients.len(),
            });
        }
        if let Some(j) = first_non_finite(&coefficients) {
            return Err(Error::NonFinite(j));
        }
        Ok(Self {
            grid: grid.clone(),
            coefficients,
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Coefficient at signed mode `m`, i.e. at `ξ = 2πm/L`.
    pub fn at_mode(&self, m: i64) -> Option<Complex64> {
        self.grid.index_of_mode(m).map(|k| self.coefficients[k])
    }

    /// `((1/2π) Σ_k |f̂_k|² Δξ)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.coefficients.iter().map(|c| c.norm_sqr()).sum();
        (sum * self.grid.frequency_spacing() / (2.0 * PI)).sqrt()
    }
}

/// `f̂(ξ_k) ≈ ∫ e^{-ixξ_k} f(x) dx` by the periodic rectangle rule.
pub fn fourier_transform(f: &Field) -> Spectrum {
    let grid = f.grid();
    let mut buf = f.values().to_vec();
    grid.fft_forward(&mut buf);
    let dx = grid.spacing();
    for (k, c) in buf.iter_mut().enumerate() {
        // e^{-i x_0 ξ_k} = e^{iπ m} = (-1)^k since n is even
        let sign = if k % 2 == 0 { dx } else { -dx };
        *c *= sign;
    }
    Spectrum {
        grid: grid.clone(),
        coefficients: buf,
    }
}

pub fn inverse_transform(s: &Spectrum) -> Field {
    let grid = s.grid();
    let inv_l = 1.0 / grid.box_length();
    let mut buf: Vec<Complex64> = s
        .coefficients()
        .iter()
        .enumerate()
        .map(|(k, &c)| if k % 2 == 0 { c * inv_l } else { -c * inv_l })
        .collect();
    grid.fft_inverse(&mut buf);
    Field::from_raw(grid, buf)
}
