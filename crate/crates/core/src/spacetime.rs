use crate::error::{invalid, Error, Result};
use crate::grid::{Field, Grid1D};

/// Fields sampled on the uniform time mesh `t_m = m T / M`, `m = 0..=M`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceTimeField {
    horizon: f64,
    slices: Vec<Field>,
}

impl SpaceTimeField {
    /// Takes ownership of `M + 1 >= 2` slices spanning `[0, horizon]`.
    pub fn new(horizon: f64, slices: Vec<Field>) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(invalid("horizon", format!("{horizon} must be positive")));
        }
        if slices.len() < 2 {
            return Err(invalid("slices", "need at least two time slices"));
        }
        let grid = slices[0].grid();
        if slices.iter().any(|s| s.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { horizon, slices })
    }

    pub fn from_fn(horizon: f64, steps: usize, f: impl Fn(f64) -> Field) -> Result<Self> {
        let dt = horizon / steps as f64;
        Self::new(horizon, (0..=steps).map(|m| f(m as f64 * dt)).collect())
    }

    /// The same field at every time.
    pub fn constant(field: &Field, horizon: f64, steps: usize) -> Result<Self> {
        Self::new(horizon, vec![field.clone(); steps + 1])
    }

    pub fn zeros(grid: &Grid1D, horizon: f64, steps: usize) -> Result<Self> {
        Self::constant(&Field::zeros(grid), horizon, steps)
    }

    pub fn grid(&self) -> &Grid1D {
        self.slices[0].grid()
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Number of time steps `M`.
    pub fn steps(&self) -> usize {
        self.slices.len() - 1
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps() as f64
    }

    pub fn time(&self, m: usize) -> f64 {
        if m == self.steps() {
            self.horizon
        } else {
            m as f64 * self.dt()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps()).map(|m| self.time(m)).collect()
    }

    pub fn slice(&self, m: usize) -> &Field {
        &self.slices[m]
    }

    pub fn slices(&self) -> &[Field] {
        &self.slices
    }

    pub fn last(&self) -> &Field {
        self.slices.last().expect("at least two slices")
    }

    pub fn into_slices(self) -> Vec<Field> {
        self.slices
    }

    /// Slice-wise map, preserving the time mesh.
    pub fn map(&self, f: impl Fn(&Field) -> Field) -> SpaceTimeField {
        SpaceTimeField {
            horizon: self.horizon,
            slices: self.slices.iter().map(f).collect(),
        }
    }

    pub fn same_mesh(&self, other: &SpaceTimeField) -> bool {
        self.steps() == other.steps()
            && self.horizon.to_bits() == other.horizon.to_bits()
            && self.grid() == other.grid()
    }

    pub fn zip_with(
        &self,
        other: &SpaceTimeField,
        f: impl Fn(&Field, &Field) -> Field,
    ) -> Result<SpaceTimeField> {
        if !self.same_mesh(other) {
            return Err(invalid("other", "space-time fields on different meshes"));
        }
        Ok(SpaceTimeField {
            horizon: self.horizon,
            slices: self.slices.iter().zip(&other.slices).map(|(a, b)| f(a, b)).collect(),
        })
    }

    /// Slice-wise difference; panics on mismatched meshes.
    pub fn difference(&self, other: &SpaceTimeField) -> SpaceTimeField {
        self.zip_with(other, |a, b| a - b).expect("mesh mismatch in difference")
    }

    pub fn is_finite(&self) -> bool {
        self.slices.iter().all(Field::is_finite)
    }
}
