//! Per-slice norm records and their CSV/JSON serialisation.
//!
//! Reals are written with 17 significant digits (`{:.16e}`), enough to
//! round-trip every `f64` exactly.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gauge::constraint_residual;
use crate::guard::BoundaryWarning;
use crate::norms::{hs, lp, triple_norm, weighted, x_norm, y_norm};
use crate::par::map_collect;
use crate::spacetime::SpaceTimeField;

/// Formats a real so that parsing it back gives the same bits.
pub fn fmt_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SliceNorms {
    pub t: f64,
    pub h2: f64,
    pub weighted_r: f64,
    pub sup: f64,
    pub constraint_residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormSummary {
    pub r: f64,
    pub triple: f64,
    pub x_norm: f64,
    pub y_norm: f64,
    /// Largest per-slice residual, when a constraint was tracked.
    pub constraint_residual: Option<f64>,
    pub boundary_warning: Option<BoundaryWarning>,
}

/// Norm history of one solution.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormReport {
    pub slices: Vec<SliceNorms>,
    pub summary: NormSummary,
}

impl NormReport {
    /// Records `‖F(t)‖_{H²}`, `‖|x|^r F(t)‖`, `‖F(t)‖_{L^∞}` for every slice.
    pub fn new(f: &SpaceTimeField, r: f64) -> Result<Self> {
        let x = x_norm(f, r)?;
        let indices: Vec<usize> = (0..=f.steps()).collect();
        let slices = map_collect(&indices, |&m| {
            let s = f.slice(m);
            SliceNorms {
                t: f.time(m),
                h2: hs(s, 2.0),
                weighted_r: weighted(s, r),
                sup: lp(s, f64::INFINITY),
                constraint_residual: None,
            }
        });
        Ok(Self {
            slices,
            summary: NormSummary {
                r,
                triple: triple_norm(f),
                x_norm: x,
                y_norm: y_norm(f),
                constraint_residual: None,
                boundary_warning: f.slices().iter().find_map(crate::guard::boundary_decay),
            },
        })
    }

    /// Adds the residual of `ψ = ∂xφ + i(λ/2)|φ|²φ` to every row.
    pub fn with_constraint(
        mut self,
        phi: &SpaceTimeField,
        psi: &SpaceTimeField,
        lambda: f64,
    ) -> Result<Self> {
        if !phi.same_mesh(psi) || phi.steps() + 1 != self.slices.len() {
            return Err(Error::GridMismatch);
        }
        let indices: Vec<usize> = (0..=phi.steps()).collect();
        let residuals = map_collect(&indices, |&m| constraint_residual(phi.slice(m), psi.slice(m), lambda))
            .into_iter()
            .collect::<Result<Vec<f64>>>()?;
        let mut worst = 0.0f64;
        for (row, res) in self.slices.iter_mut().zip(residuals) {
            row.constraint_residual = Some(res);
            worst = worst.max(res);
        }
        self.summary.constraint_residual = Some(worst);
        Ok(self)
    }

    pub const CSV_HEADER: &'static str = "t,h2,weighted_r,sup,constraint_residual";

    /// One row per slice; an absent residual is an empty cell. The summary
    /// follows as a single `# `-prefixed JSON line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for s in &self.slices {
            let res = s.constraint_residual.map(fmt_real).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                fmt_real(s.t),
                fmt_real(s.h2),
                fmt_real(s.weighted_r),
                fmt_real(s.sup),
                res
            );
        }
        let _ = writeln!(out, "# {}", self.summary_json());
        out
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string(&self.summary).expect("summary serialises")
    }

    pub fn max_h2(&self) -> f64 {
        self.slices.iter().map(|s| s.h2).fold(0.0, f64::max)
    }

    pub fn max_weighted(&self) -> f64 {
        self.slices.iter().map(|s| s.weighted_r).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::constraint_map;
    use crate::grid::{Field, Grid1D};
    use num_complex::Complex64;

    fn gaussian(g: &Grid1D) -> Field {
        Field::from_fn(g, |x| Complex64::new((-x * x / 2.0).exp(), 0.0)).unwrap()
    }

    #[test]
    fn reals_round_trip_through_text() {
        for x in [0.0, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.1 + 0.2] {
            let s = fmt_real(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_real(f64::INFINITY), "inf");
    }

    #[test]
    fn zero_field_gives_zero_rows() {
        let g = Grid1D::new(64, 16.0).unwrap();
        let f = SpaceTimeField::zeros(&g, 0.5, 4).unwrap();
        let report = NormReport::new(&f, 0.5).unwrap();
        assert_eq!(report.slices.len(), 5);
        assert!(report.slices.iter().all(|s| s.h2 == 0.0 && s.weighted_r == 0.0 && s.sup == 0.0));
        assert_eq!(report.summary.x_norm, 0.0);
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], NormReport::CSV_HEADER);
        assert_eq!(lines.len(), 1 + 5 + 1);
        assert!(lines[6].starts_with("# {"));
        assert!(lines[1].ends_with(','));
    }

    #[test]
    fn constant_in_time_field_and_residual_column() {
        let g = Grid1D::new(256, 32.0).unwrap();
        let phi0 = gaussian(&g);
        let phi = SpaceTimeField::constant(&phi0, 1.0, 3).unwrap();
        let psi = SpaceTimeField::constant(&constraint_map(&phi0, 1.0), 1.0, 3).unwrap();
        let report = NormReport::new(&phi, 1.0)
            .unwrap()
            .with_constraint(&phi, &psi, 1.0)
            .unwrap();
        let first = &report.slices[0];
        assert!(report.slices.iter().all(|s| s == &SliceNorms { t: s.t, ..first.clone() }));
        assert!((first.sup - 1.0).abs() < 1e-15);
        assert!(report.summary.constraint_residual.unwrap() < 1e-14);
        let json: serde_json::Value =
            serde_json::from_str(report.to_csv().lines().last().unwrap().trim_start_matches("# ")).unwrap();
        assert_eq!(json["r"], 1.0);
        let wrong = SpaceTimeField::constant(&phi0, 1.0, 4).unwrap();
        assert!(NormReport::new(&phi, 1.0).unwrap().with_constraint(&wrong, &wrong, 1.0).is_err());
    }
}
