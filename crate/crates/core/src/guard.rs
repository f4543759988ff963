//! Boundary-decay monitoring for the periodic truncation of ℝ.

use serde::Serialize;

use crate::grid::Field;

/// Largest boundary sample allowed, relative to the global maximum.
pub const DECAY_TOLERANCE: f64 = 1e-8;

/// Emitted when a field is not negligible near the edges of the box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundaryWarning {
    pub edge_max: f64,
    pub field_max: f64,
}

impl BoundaryWarning {
    pub fn relative(&self) -> f64 {
        self.edge_max / self.field_max
    }
}

/// A computed value together with the guard verdict on its input.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Guarded<T> {
    pub value: T,
    pub warning: Option<BoundaryWarning>,
}

impl<T> Guarded<T> {
    pub fn into_value(self) -> T {
        self.value
    }
}

/// Number of cells on each side treated as the boundary layer.
pub fn edge_width(n_points: usize) -> usize {
    (n_points / 32).max(1)
}

/// Checks `max_{edge} |f| < 1e-8 · max |f|` over the outer `n/32` cells.
pub fn boundary_decay(f: &Field) -> Option<BoundaryWarning> {
    let field_max = f.max_abs();
    if field_max == 0.0 {
        return None;
    }
    let w = edge_width(f.len());
    let v = f.values();
    let edge_max = v[..w]
        .iter()
        .chain(&v[v.len() - w..])
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    (edge_max >= DECAY_TOLERANCE * field_max).then_some(BoundaryWarning { edge_max, field_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;
    use num_complex::Complex64;

    #[test]
    fn decaying_field_passes_and_edge_bump_fails() {
        let g = Grid1D::new(256, 64.0).unwrap();
        let centred = Field::from_fn(&g, |x| Complex64::new((-x * x).exp(), 0.0)).unwrap();
        assert!(boundary_decay(&centred).is_none());
        let edge = Field::from_fn(&g, |x| Complex64::new((-(x + 31.0).powi(2)).exp(), 0.0)).unwrap();
        let w = boundary_decay(&edge).expect("edge bump must warn");
        assert!(w.relative() > 0.1);
        assert!(boundary_decay(&Field::zeros(&g)).is_none());
    }
}
