//! Fourier-multiplier operators on a [`Field`].
//!
//! Every operator here is `f ↦ F⁻¹[m(ξ) f̂(ξ)]` for a symbol `m`. The
//! transform scaling cancels inside a multiplier, so the kernels work on raw
//! FFT output and divide by `n` once on the way back.

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::grid::{Field, Grid1D};

/// Applies the symbol `symbol(k, ξ_k)` where `k` is the FFT index.
pub fn apply_multiplier(f: &Field, symbol: impl Fn(usize, f64) -> Complex64) -> Field {
    let grid = f.grid();
    let mut buf = f.values().to_vec();
    multiply_in_place(grid, &mut buf, symbol);
    Field::from_raw(grid, buf)
}

pub(crate) fn multiply_in_place(
    grid: &Grid1D,
    buf: &mut [Complex64],
    symbol: impl Fn(usize, f64) -> Complex64,
) {
    grid.fft_forward(buf);
    let scale = 1.0 / grid.n_points() as f64;
    for (k, c) in buf.iter_mut().enumerate() {
        *c *= symbol(k, grid.wavenumber(k)) * scale;
    }
    grid.fft_inverse(buf);
}

/// Real-valued symbol variant, which is the common case.
pub(crate) fn apply_real_multiplier(f: &Field, symbol: impl Fn(usize, f64) -> f64) -> Field {
    apply_multiplier(f, |k, xi| Complex64::new(symbol(k, xi), 0.0))
}

/// Free Schrödinger group `e^{it∂²}`: symbol `e^{-itξ²}`. Defined for every real `t`.
pub fn free_propagator(f: &Field, t: f64) -> Field {
    if t == 0.0 {
        return f.clone();
    }
    apply_multiplier(f, |_, xi| Complex64::from_polar(1.0, -t * xi * xi))
}

/// `D^α`: symbol `|ξ|^α`, `α ≥ 0`. The zero mode is annihilated for `α > 0`.
pub fn fractional_derivative(f: &Field, alpha: f64) -> Result<Field> {
    if alpha.is_nan() || alpha < 0.0 {
        return Err(invalid("alpha", format!("fractional order {alpha} must be >= 0")));
    }
    if alpha == 0.0 {
        return Ok(f.clone());
    }
    Ok(apply_real_multiplier(f, |_, xi| {
        if xi == 0.0 {
            0.0
        } else {
            xi.abs().powf(alpha)
        }
    }))
}

/// `∂x` or `∂x²`: symbol `(iξ)^order`, Nyquist mode dropped for odd orders.
pub fn spatial_derivative(f: &Field, order: u32) -> Result<Field> {
    let nyq = f.grid().nyquist_index();
    match order {
        1 => Ok(apply_multiplier(f, |k, xi| {
            if k == nyq {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, xi)
            }
        })),
        2 => Ok(apply_real_multiplier(f, |_, xi| -xi * xi)),
        _ => Err(invalid("order", format!("derivative order {order} is not 1 or 2"))),
    }
}

pub(crate) fn dx(f: &Field) -> Field {
    spatial_derivative(f, 1).expect("order 1 is valid")
}

pub(crate) fn dxx(f: &Field) -> Field {
    spatial_derivative(f, 2).expect("order 2 is valid")
}

/// `(1 + D²)^α`: symbol `(1 + ξ²)^α`, any real `α`.
pub fn bessel_potential(f: &Field, alpha: f64) -> Field {
    if alpha == 0.0 {
        return f.clone();
    }
    apply_real_multiplier(f, |_, xi| (1.0 + xi * xi).powf(alpha))
}

/// Keeps modes with `|ξ| <= cutoff` and zeroes the rest (the Nyquist mode is
/// always dropped unless `cutoff` reaches it).
pub fn low_pass(f: &Field, cutoff: f64) -> Field {
    apply_real_multiplier(f, |_, xi| if xi.abs() <= cutoff { 1.0 } else { 0.0 })
}

/// Whether FFT index `k` survives the 2/3 truncation rule (`|m| < n/3`).
pub(crate) fn two_thirds_mask(grid: &Grid1D) -> Vec<bool> {
    let limit = grid.n_points() as i64 / 3;
    (0..grid.n_points()).map(|k| grid.mode(k).abs() < limit).collect()
}

pub fn dealias(f: &Field) -> Field {
    let mask = two_thirds_mask(f.grid());
    apply_real_multiplier(f, |k, _| if mask[k] { 1.0 } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{fourier_transform, inverse_transform};
    use std::f64::consts::PI;

    fn grid_2pi(n: usize) -> Grid1D {
        Grid1D::new(n, 2.0 * PI).unwrap()
    }

    fn plane(g: &Grid1D, k: f64) -> Field {
        Field::from_fn(g, |x| Complex64::from_polar(1.0, k * x)).unwrap()
    }

    fn max_diff(a: &Field, b: &Field) -> f64 {
        a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    fn gaussian(g: &Grid1D) -> Field {
        Field::from_fn(g, |x| Complex64::new((-x * x / 2.0).exp(), 0.0)).unwrap()
    }

    #[test]
    fn gaussian_spectrum_matches_closed_form() {
        let g = Grid1D::new(1024, 64.0).unwrap();
        let s = fourier_transform(&gaussian(&g));
        for (k, c) in s.coefficients().iter().enumerate() {
            let xi = g.wavenumber(k);
            let exact = (2.0 * PI).sqrt() * (-xi * xi / 2.0).exp();
            assert!((c - Complex64::new(exact, 0.0)).norm() < 1e-10, "ξ = {xi}");
        }
    }

    #[test]
    fn propagator_identity_and_plane_wave() {
        let g = grid_2pi(64);
        let f = plane(&g, 3.0);
        assert_eq!(free_propagator(&f, 0.0), f);
        let t = 0.37;
        let out = free_propagator(&f, t);
        let expect = &f * Complex64::from_polar(1.0, -t * 9.0);
        assert!(max_diff(&out, &expect) < 1e-12);
    }

    #[test]
    fn propagator_matches_gaussian_spreading() {
        let g = Grid1D::new(1024, 64.0).unwrap();
        let t = 0.5;
        let out = free_propagator(&gaussian(&g), t);
        let exact = Field::from_fn(&g, |x| {
            let w = Complex64::new(1.0, 2.0 * t);
            w.powf(-0.5) * (-(x * x) / (2.0 * w)).exp()
        })
        .unwrap();
        assert!(max_diff(&out, &exact) < 1e-10);
    }

    #[test]
    fn fractional_derivative_of_plane_wave() {
        let g = grid_2pi(64);
        let f = plane(&g, -4.0);
        let out = fractional_derivative(&f, 0.7).unwrap();
        assert!(max_diff(&out, &(&f * 4f64.powf(0.7))) < 1e-12);
        assert_eq!(fractional_derivative(&f, 0.0).unwrap(), f);
        assert!(fractional_derivative(&f, -0.5).is_err());
    }

    #[test]
    fn fractional_derivative_kills_constants_only_for_positive_order() {
        let g = grid_2pi(32);
        let one = Field::from_fn(&g, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(fractional_derivative(&one, 0.3).unwrap().max_abs() < 1e-14);
        assert_eq!(fractional_derivative(&one, 0.0).unwrap(), one);
    }

    #[test]
    fn integer_derivatives() {
        let g = grid_2pi(64);
        let f = plane(&g, 6.0);
        let d1 = spatial_derivative(&f, 1).unwrap();
        assert!(max_diff(&d1, &(&f * Complex64::new(0.0, 6.0))) < 1e-12);
        let one = Field::from_fn(&g, |_| Complex64::new(2.5, 0.0)).unwrap();
        assert!(spatial_derivative(&one, 2).unwrap().max_abs() < 1e-13);
        let s = Field::from_fn(&g, |x| Complex64::new(x.sin(), 0.0)).unwrap();
        let d2 = spatial_derivative(&s, 2).unwrap();
        assert!(max_diff(&d2, &(&s * -1.0)) < 1e-12);
        assert!(spatial_derivative(&s, 3).is_err());
        assert!(spatial_derivative(&s, 0).is_err());
    }

    #[test]
    fn nyquist_mode_is_dropped_by_first_derivative() {
        let g = grid_2pi(32);
        // cos(16x) sampled on 32 points is the alternating sequence
        let f = Field::from_fn(&g, |x| Complex64::new((16.0 * x).cos(), 0.0)).unwrap();
        let d = spatial_derivative(&f, 1).unwrap();
        assert!(d.max_abs() < 1e-12);
        let d2 = spatial_derivative(&f, 2).unwrap();
        assert!(d2.max_abs() <= 256.0 * (1.0 + 1e-12));
    }

    #[test]
    fn bessel_potential_inverts() {
        let g = Grid1D::new(256, 30.0).unwrap();
        let f = Field::from_fn(&g, |x| Complex64::new((-x * x).exp(), x * (-x * x).exp())).unwrap();
        assert_eq!(bessel_potential(&f, 0.0), f);
        let back = bessel_potential(&bessel_potential(&f, 1.3), -1.3);
        assert!(max_diff(&back, &f) < 1e-12);
        let p = plane(&grid_2pi(32), 3.0);
        let out = bessel_potential(&p, 0.5);
        assert!(max_diff(&out, &(&p * 10f64.sqrt())) < 1e-12);
    }

    #[test]
    fn dealias_keeps_low_modes_and_drops_high() {
        let g = grid_2pi(48 / 3 * 4); // 64 points, cutoff |m| < 21
        let low = plane(&g, 20.0);
        assert!(max_diff(&dealias(&low), &low) < 1e-12);
        assert!(dealias(&plane(&g, 21.0)).max_abs() < 1e-12);
    }

    #[test]
    fn low_pass_via_spectrum() {
        let g = grid_2pi(64);
        let f = &plane(&g, 2.0) + &plane(&g, 9.0);
        let lp = low_pass(&f, 5.0);
        assert!(max_diff(&lp, &plane(&g, 2.0)) < 1e-12);
        let s = fourier_transform(&lp);
        assert!(s.at_mode(9).unwrap().norm() < 1e-12);
        assert!(max_diff(&inverse_transform(&s), &lp) < 1e-13);
    }
}
