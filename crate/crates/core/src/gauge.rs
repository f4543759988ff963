//! Gauge transformation between DNLS and the cubic NLS system.
//!
//! The lower limit `-∞` of the mass integral is taken at the left edge of
//! the box. The resulting factor is not periodic: it jumps by
//! `exp(iλ‖u‖²)` across the seam, which is harmless as long as the field is
//! negligible there (see [`crate::guard`]).

use num_complex::Complex64;

use crate::error::Result;
use crate::grid::{Field, Grid1D};
use crate::guard::{boundary_decay, Guarded};
use crate::norms::l2;
use crate::spectral::{dx, multiply_in_place};

/// Unit-modulus factor `exp(iλ ∫_{-L/2}^x |f|² dy)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeFactor {
    grid: Grid1D,
    values: Vec<Complex64>,
    wrap_phase: f64,
}

impl GaugeFactor {
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Total phase gained across the box, `λ ‖f‖²_{L²}`.
    pub fn wrap_phase(&self) -> f64 {
        self.wrap_phase
    }

    pub fn apply(&self, f: &Field) -> Field {
        assert!(f.grid() == &self.grid, "gauge factor applied on a different grid");
        Field::from_raw(
            &self.grid,
            f.values().iter().zip(&self.values).map(|(a, e)| a * e).collect(),
        )
    }
}

fn mass_profile(f: &Field) -> (Vec<f64>, f64) {
    let grid = f.grid();
    let n = grid.n_points();
    let density = f.abs_squared();
    let mean = density.iter().sum::<f64>() / n as f64;
    let total = mean * grid.box_length();
    if mean == 0.0 {
        return (vec![0.0; n], 0.0);
    }
    // periodic antiderivative of the zero-mean part, plus the linear ramp of the mean
    let mut buf: Vec<Complex64> = density.iter().map(|&d| Complex64::new(d - mean, 0.0)).collect();
    let nyq = grid.nyquist_index();
    multiply_in_place(grid, &mut buf, |k, xi| {
        if k == 0 || k == nyq {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, -1.0 / xi)
        }
    });
    let origin = buf[0].re;
    let h = grid.spacing();
    let mass = buf
        .iter()
        .enumerate()
        .map(|(j, p)| mean * (j as f64 * h) + (p.re - origin))
        .collect();
    (mass, total)
}

/// `∫_{-L/2}^{x_j} |u|² dy` at every node.
///
/// Evaluated spectrally, so the value reached after a full period is exactly
/// the discrete mass `‖u‖²_{L²}`; for a decaying field the last node already
/// carries it.
pub fn cumulative_mass(u: &Field) -> Guarded<Vec<f64>> {
    Guarded {
        value: mass_profile(u).0,
        warning: boundary_decay(u),
    }
}

/// `exp(iλ ∫_{-L/2}^x |f|²)` together with its seam jump.
pub fn gauge_factor(f: &Field, lambda: f64) -> Guarded<GaugeFactor> {
    let (mass, total) = mass_profile(f);
    let values = mass.iter().map(|&m| Complex64::from_polar(1.0, lambda * m)).collect();
    Guarded {
        value: GaugeFactor {
            grid: f.grid().clone(),
            values,
            wrap_phase: lambda * total,
        },
        warning: boundary_decay(f),
    }
}

/// `φ = exp(-iλ ∫_{-L/2}^x |u|²) u`.
pub fn gauge_forward(u: &Field, lambda: f64) -> Guarded<Field> {
    let factor = gauge_factor(u, -lambda);
    Guarded {
        value: factor.value.apply(u),
        warning: factor.warning,
    }
}

/// `u = exp(iλ ∫_{-L/2}^x |φ|²) φ`. Since `|φ| = |u|`, this undoes
/// [`gauge_forward`] with the same mass profile.
pub fn gauge_inverse(phi: &Field, lambda: f64) -> Guarded<Field> {
    let factor = gauge_factor(phi, lambda);
    Guarded {
        value: factor.value.apply(phi),
        warning: factor.warning,
    }
}

/// `ψ = ∂xφ + i(λ/2)|φ|²φ`.
pub fn constraint_map(phi: &Field, lambda: f64) -> Field {
    let half = Complex64::new(0.0, 0.5 * lambda);
    dx(phi)
        .zip_with(phi, |d, p| d + half * p.norm_sqr() * p)
        .expect("same grid")
}

/// `‖ψ - constraint_map(φ, λ)‖_{L²} / max(1, ‖ψ‖_{L²})`.
pub fn constraint_residual(phi: &Field, psi: &Field, lambda: f64) -> Result<f64> {
    phi.check_grid(psi)?;
    let target = constraint_map(phi, lambda);
    Ok(l2(&(psi - &target)) / l2(psi).max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::{lp, weighted};
    use std::f64::consts::PI;

    fn gaussian(g: &Grid1D, a: f64) -> Field {
        Field::from_fn(g, |x| Complex64::new(a * (-x * x / 2.0).exp(), 0.0)).unwrap()
    }

    fn max_diff(a: &Field, b: &Field) -> f64 {
        a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn cumulative_mass_of_zero_and_constant() {
        let g = Grid1D::new(64, 10.0).unwrap();
        assert!(cumulative_mass(&Field::zeros(&g)).value.iter().all(|&m| m == 0.0));
        let c = 1.7;
        let f = Field::from_fn(&g, |_| Complex64::new(0.0, c)).unwrap();
        let m = cumulative_mass(&f).value;
        for (j, mj) in m.iter().enumerate() {
            let expect = c * c * (g.node(j) + 5.0);
            assert!((mj - expect).abs() < 1e-12, "{j}: {mj} vs {expect}");
        }
    }

    #[test]
    fn cumulative_mass_of_gaussian_is_erf_profile() {
        let g = Grid1D::new(1024, 64.0).unwrap();
        let f = gaussian(&g, 1.0);
        let m = cumulative_mass(&f);
        assert!(m.warning.is_none());
        let half_sqrt_pi = PI.sqrt() / 2.0;
        for (j, mj) in m.value.iter().enumerate() {
            let x = g.node(j);
            let expect = half_sqrt_pi * (libm::erf(x) - libm::erf(-32.0));
            assert!((mj - expect).abs() < 1e-8, "x = {x}");
        }
        let total = lp(&f, 2.0).powi(2);
        assert!((m.value.last().unwrap() - total).abs() < 1e-12);
    }

    #[test]
    fn gauge_with_zero_lambda_is_identity() {
        let g = Grid1D::new(128, 20.0).unwrap();
        let f = gaussian(&g, 0.8);
        assert_eq!(gauge_forward(&f, 0.0).value, f);
        assert_eq!(gauge_inverse(&f, 0.0).value, f);
        assert_eq!(gauge_inverse(&Field::zeros(&g), 3.0).value, Field::zeros(&g));
    }

    #[test]
    fn gauge_preserves_modulus_and_weighted_norms() {
        let g = Grid1D::new(512, 40.0).unwrap();
        let u = Field::from_fn(&g, |x| {
            Complex64::new(1.0 + 0.5 * x, -0.3 * x * x) * (-x * x / 3.0).exp()
        })
        .unwrap();
        let phi = gauge_forward(&u, 2.5).value;
        for (a, b) in u.values().iter().zip(phi.values()) {
            assert!((a.norm() - b.norm()).abs() < 1e-12);
        }
        for r in [0.0, 0.25, 0.5, 1.0] {
            assert!((weighted(&u, r) - weighted(&phi, r)).abs() < 1e-10);
        }
        for p in [1.0, 2.0, 4.0, f64::INFINITY] {
            assert!((lp(&u, p) - lp(&phi, p)).abs() < 1e-10);
        }
        let back = gauge_inverse(&phi, 2.5).value;
        assert!(max_diff(&back, &u) < 1e-12);
    }

    #[test]
    fn gauge_factor_phase_at_the_right_edge() {
        let g = Grid1D::new(1024, 64.0).unwrap();
        let u = gaussian(&g, 1.0);
        let mass = lp(&u, 2.0).powi(2);
        let forward = gauge_factor(&u, -1.0).value;
        assert!((forward.wrap_phase() + mass).abs() < 1e-10);
        let right = forward.values().last().unwrap();
        assert!((right - Complex64::from_polar(1.0, -mass)).norm() < 1e-12);
        assert!(forward.values().iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn constraint_map_on_plane_wave() {
        let g = Grid1D::new(64, 2.0 * PI).unwrap();
        let (k, a, lambda) = (3.0, 0.7, 1.3);
        let phi = Field::from_fn(&g, |x| Complex64::from_polar(a, k * x)).unwrap();
        let psi = constraint_map(&phi, lambda);
        let coef = Complex64::new(0.0, k * a + 0.5 * lambda * a * a * a);
        let expect = Field::from_fn(&g, |x| coef * Complex64::from_polar(1.0, k * x)).unwrap();
        assert!(max_diff(&psi, &expect) < 1e-12);
        assert_eq!(constraint_map(&Field::zeros(&g), lambda), Field::zeros(&g));
    }

    #[test]
    fn constraint_map_matches_finite_differences() {
        let g = Grid1D::new(1024, 64.0).unwrap();
        let lambda = 2.0;
        let phi_fn = |x: f64| Complex64::new((-x * x / 2.0).exp(), 0.3 * x * (-x * x / 2.0).exp());
        let phi = Field::from_fn(&g, phi_fn).unwrap();
        let psi = constraint_map(&phi, lambda);
        let h = 1e-4;
        for j in (0..1024).step_by(7) {
            let x = g.node(j);
            let d = (phi_fn(x + h) - phi_fn(x - h)) / (2.0 * h);
            let p = phi_fn(x);
            let expect = d + Complex64::new(0.0, lambda / 2.0) * p.norm_sqr() * p;
            assert!((psi.values()[j] - expect).norm() < 1e-6);
        }
    }

    #[test]
    fn constraint_residual_is_linear_in_perturbation() {
        let g = Grid1D::new(256, 32.0).unwrap();
        let phi = gaussian(&g, 1.5);
        let psi = constraint_map(&phi, 1.0);
        assert!(constraint_residual(&phi, &psi, 1.0).unwrap() < 1e-14);
        let z = Field::zeros(&g);
        assert_eq!(constraint_residual(&z, &z, 1.0).unwrap(), 0.0);
        // unit-norm bump
        let bump = gaussian(&g, 1.0);
        let bump = &bump * (1.0 / lp(&bump, 2.0));
        let eps = 1e-3;
        let perturbed = &psi + &(&bump * eps);
        let res = constraint_residual(&phi, &perturbed, 1.0).unwrap();
        assert!(lp(&perturbed, 2.0) >= 1.0);
        let expected = eps / lp(&perturbed, 2.0);
        assert!((res - expected).abs() < 1e-12, "{res} vs {expected}");
    }
}
