//! Spatial, weighted and space-time norms.
//!
//! Spatial integrals use the trapezoid rule on the periodic grid (which is
//! the rectangle rule there). Time integrals use composite trapezoid over the
//! stored slices. Exponents are plain `f64`; pass `f64::INFINITY` for a
//! supremum.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::grid::{fourier_transform, Field};
use crate::guard::{boundary_decay, Guarded};
use crate::spacetime::SpaceTimeField;
use crate::spectral::{dx, dxx};

fn check_exponent(name: &'static str, p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        Err(invalid(name, format!("exponent {p} must lie in [1, ∞]")))
    } else {
        Ok(())
    }
}

/// Scaled p-norm of a non-negative sequence with quadrature weights.
fn weighted_power_mean(values: impl Iterator<Item = (f64, f64)> + Clone, p: f64) -> f64 {
    let peak = values.clone().map(|(v, _)| v).fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let sum: f64 = values.map(|(v, w)| w * (v / peak).powf(p)).sum();
    peak * sum.powf(1.0 / p)
}

pub(crate) fn lp(f: &Field, p: f64) -> f64 {
    if p.is_infinite() {
        return f.max_abs();
    }
    let h = f.grid().spacing();
    if p == 2.0 {
        let s: f64 = f.values().iter().map(|z| z.norm_sqr()).sum();
        return (h * s).sqrt();
    }
    weighted_power_mean(f.values().iter().map(|z| (z.norm(), h)), p)
}

pub(crate) fn l2(f: &Field) -> f64 {
    lp(f, 2.0)
}

/// `‖f‖_{L^p}` over the box, `p ∈ [1, ∞]`.
pub fn lp_norm(f: &Field, p: f64) -> Result<f64> {
    check_exponent("p", p)?;
    Ok(lp(f, p))
}

pub(crate) fn hs(f: &Field, s: f64) -> f64 {
    let spec = fourier_transform(f);
    let grid = f.grid();
    let sum: f64 = spec
        .coefficients()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let xi = grid.wavenumber(k);
            (1.0 + xi * xi).powf(s) * c.norm_sqr()
        })
        .sum();
    (sum * grid.frequency_spacing() / (2.0 * PI)).sqrt()
}

/// `(1/2π ∫ (1+ξ²)^s |f̂|² dξ)^{1/2}`, normalised so that `H⁰ = L²`.
pub fn sobolev_norm(f: &Field, s: f64) -> Result<f64> {
    if s.is_nan() || s < 0.0 {
        return Err(invalid("s", format!("regularity {s} must be >= 0")));
    }
    Ok(hs(f, s))
}

/// Riemann zeta for real `s < 0` (not an even integer), via the reflection
/// formula and Euler-Maclaurin summation of `ζ(1 - s)`.
fn zeta_negative(s: f64) -> f64 {
    let sigma = 1.0 - s;
    const N: f64 = 12.0;
    // B_{2j} / (2j)!
    const BERNOULLI: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
    ];
    let mut z: f64 = (1..12).map(|k| (k as f64).powf(-sigma)).sum();
    z += N.powf(1.0 - sigma) / (sigma - 1.0) + 0.5 * N.powf(-sigma);
    let mut rising = sigma;
    for (j, b) in BERNOULLI.iter().enumerate() {
        let j = j as i32 + 1;
        z += b * rising * N.powf(-sigma - (2 * j - 1) as f64);
        rising *= (sigma + (2 * j - 1) as f64) * (sigma + (2 * j) as f64);
    }
    2f64.powf(s) * PI.powf(s - 1.0) * (PI * s / 2.0).sin() * libm::tgamma(1.0 - s) * z
}

/// Trapezoid rule for `∫ |x|^{2r} |f|² dx`, corrected for the kink of the
/// weight at `x = 0`: the plain rule is only `O(h^{1+2r})` there. The
/// endpoint expansion for `∫₀ x^β g` contributes `ζ(-β-k) g⁽ᵏ⁾(0) h^{β+k+1}/k!`
/// per side; odd `k` cancel between the two half-lines, and `k = 0, 2, 4`
/// are removed here.
pub(crate) fn weighted(f: &Field, r: f64) -> f64 {
    let g = f.grid();
    let h = g.spacing();
    let s: f64 = f
        .values()
        .iter()
        .enumerate()
        .map(|(j, z)| {
            let x = g.node(j).abs();
            let w = if r == 0.0 { 1.0 } else { x.powf(2.0 * r) };
            w * z.norm_sqr()
        })
        .sum();
    let mut integral = h * s;
    if r > 0.0 && r < 1.0 {
        let beta = 2.0 * r;
        let centre = g.n_points() / 2;
        let density = Field::from_raw(
            g,
            f.values().iter().map(|z| Complex64::new(z.norm_sqr(), 0.0)).collect(),
        );
        let g0 = density.values()[centre].re;
        let second = dxx(&density);
        let g2 = second.values()[centre].re;
        let g4 = dxx(&second).values()[centre].re;
        integral -= 2.0 * zeta_negative(-beta) * g0 * h.powf(1.0 + beta);
        integral -= zeta_negative(-beta - 2.0) * g2 * h.powf(3.0 + beta);
        integral -= zeta_negative(-beta - 4.0) * g4 * h.powf(5.0 + beta) / 12.0;
    }
    integral.max(0.0).sqrt()
}

/// `‖|x|^r f‖_{L²}` for `r ∈ [0, 1]`, with the boundary-decay verdict.
pub fn weighted_norm(f: &Field, r: f64) -> Result<Guarded<f64>> {
    if r.is_nan() || !(0.0..=1.0).contains(&r) {
        return Err(invalid("r", format!("weight exponent {r} must lie in [0, 1]")));
    }
    Ok(Guarded {
        value: weighted(f, r),
        warning: boundary_decay(f),
    })
}

/// Composite-trapezoid `L^q` norm in time of per-slice values.
pub(crate) fn time_lq(values: &[f64], dt: f64, q: f64) -> f64 {
    if q.is_infinite() {
        return values.iter().copied().fold(0.0, f64::max);
    }
    let last = values.len() - 1;
    weighted_power_mean(
        values.iter().enumerate().map(|(m, &v)| {
            let w = if m == 0 || m == last { 0.5 * dt } else { dt };
            (v, w)
        }),
        q,
    )
}

pub(crate) fn mixed(f: &SpaceTimeField, q: f64, p: f64) -> f64 {
    let per_slice: Vec<f64> = f.slices().iter().map(|s| lp(s, p)).collect();
    time_lq(&per_slice, f.dt(), q)
}

/// `‖F‖_{L^q_T L^p_x}`.
pub fn mixed_norm(f: &SpaceTimeField, q: f64, p: f64) -> Result<f64> {
    check_exponent("q", q)?;
    check_exponent("p", p)?;
    Ok(mixed(f, q, p))
}

/// `‖F‖_{L^∞_T L²_x} + ‖F‖_{L⁴_T L^∞_x}`.
pub fn triple_norm(f: &SpaceTimeField) -> f64 {
    mixed(f, f64::INFINITY, 2.0) + mixed(f, 4.0, f64::INFINITY)
}

/// Triple norms of `F`, `∂xF` and `∂x²F`.
pub fn derivative_triple_norms(f: &SpaceTimeField) -> [f64; 3] {
    [
        triple_norm(f),
        triple_norm(&f.map(dx)),
        triple_norm(&f.map(dxx)),
    ]
}

/// `⦀F⦀ + ⦀∂xF⦀ + ⦀∂x²F⦀`.
pub fn y_norm(f: &SpaceTimeField) -> f64 {
    derivative_triple_norms(f).iter().sum()
}

/// `‖|x|^r F‖_{L^∞_T L²_x}`.
pub fn weighted_sup(f: &SpaceTimeField, r: f64) -> f64 {
    f.slices().iter().map(|s| weighted(s, r)).fold(0.0, f64::max)
}

/// `‖F‖_{Y_T} + ‖|x|^r F‖_{L^∞_T L²_x}`.
pub fn x_norm(f: &SpaceTimeField, r: f64) -> Result<f64> {
    if r.is_nan() || !(0.0..=1.0).contains(&r) {
        return Err(invalid("r", format!("weight exponent {r} must lie in [0, 1]")));
    }
    Ok(y_norm(f) + weighted_sup(f, r))
}

/// `‖φ‖_{X_T} + ‖ψ‖_{X_T}`.
pub fn x_pair_norm(phi: &SpaceTimeField, psi: &SpaceTimeField, r: f64) -> Result<f64> {
    Ok(x_norm(phi, r)? + x_norm(psi, r)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;
    use crate::spectral::bessel_potential;
    use num_complex::Complex64;

    fn gaussian(g: &Grid1D) -> Field {
        Field::from_fn(g, |x| Complex64::new((-x * x / 2.0).exp(), 0.0)).unwrap()
    }

    fn constant(g: &Grid1D, c: Complex64) -> Field {
        Field::from_fn(g, |_| c).unwrap()
    }

    /// Composite Simpson on `[a, b]` with `n` (even) panels.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn lp_of_zero_constant_and_gaussian() {
        let g = Grid1D::new(1024, 64.0).unwrap();
        assert_eq!(lp_norm(&Field::zeros(&g), 3.0).unwrap(), 0.0);
        let c = constant(&g, Complex64::new(0.0, -1.5));
        for p in [1.0, 2.0, 3.5] {
            let expect = 1.5 * 64f64.powf(1.0 / p);
            assert!((lp_norm(&c, p).unwrap() - expect).abs() < 1e-12 * expect);
        }
        assert_eq!(lp_norm(&c, f64::INFINITY).unwrap(), 1.5);
        let expect = PI.powf(0.25);
        assert!((lp_norm(&gaussian(&g), 2.0).unwrap() - expect).abs() < 1e-8);
        assert!(lp_norm(&c, 0.5).is_err());
    }

    #[test]
    fn sobolev_norm_basics() {
        let g = Grid1D::new(1024, 64.0).unwrap();
        assert_eq!(sobolev_norm(&Field::zeros(&g), 2.0).unwrap(), 0.0);
        let f = gaussian(&g);
        let h0 = sobolev_norm(&f, 0.0).unwrap();
        assert!((h0 - lp_norm(&f, 2.0).unwrap()).abs() < 1e-12 * h0);
        assert!(sobolev_norm(&f, -1.0).is_err());
    }

    #[test]
    fn h2_of_gaussian_matches_quadrature_of_analytic_spectrum() {
        // (1/2π) ∫ (1+ξ²)² · 2π e^{-ξ²} dξ
        let oracle = simpson(|xi| (1.0 + xi * xi).powi(2) * (-xi * xi).exp(), -40.0, 40.0, 40_000).sqrt();
        let g = Grid1D::new(1024, 64.0).unwrap();
        let h2 = sobolev_norm(&gaussian(&g), 2.0).unwrap();
        assert!((h2 - oracle).abs() < 1e-8 * oracle, "{h2} vs {oracle}");
    }

    #[test]
    fn bessel_potential_norm_is_sobolev_norm() {
        let g = Grid1D::new(1024, 64.0).unwrap();
        let f = gaussian(&g);
        for s in [0.5, 1.0, 2.0] {
            let a = lp_norm(&bessel_potential(&f, s / 2.0), 2.0).unwrap();
            let b = sobolev_norm(&f, s).unwrap();
            assert!((a - b).abs() < 1e-10 * b);
        }
    }

    #[test]
    fn weighted_norm_of_gaussian() {
        let g = Grid1D::new(1024, 64.0).unwrap();
        let f = gaussian(&g);
        let w0 = weighted_norm(&f, 0.0).unwrap();
        assert!(w0.warning.is_none());
        assert!((w0.value - lp_norm(&f, 2.0).unwrap()).abs() < 1e-14);
        let w1 = weighted_norm(&f, 1.0).unwrap().value;
        assert!((w1 - (PI.sqrt() / 2.0).sqrt()).abs() < 1e-8);
        assert!(weighted_norm(&f, 1.5).is_err());
        assert!(weighted_norm(&f, -0.1).is_err());
    }

    #[test]
    fn zeta_at_negative_arguments() {
        assert!((zeta_negative(-1.0) + 1.0 / 12.0).abs() < 1e-14);
        assert!((zeta_negative(-3.0) - 1.0 / 120.0).abs() < 1e-14);
        assert!((zeta_negative(-0.5) + 0.207_886_224_977_354_57).abs() < 1e-13);
        assert!(zeta_negative(-2.0).abs() < 1e-15);
    }

    #[test]
    fn fractional_weight_quadrature_is_high_order() {
        // ∫ |x|^{2r} e^{-x²} dx = Γ(r + 1/2)
        for n in [512, 1024] {
            let g = Grid1D::new(n, 64.0).unwrap();
            let f = gaussian(&g);
            for r in [0.1, 0.25, 0.5, 0.75, 0.9] {
                let exact = libm::tgamma(r + 0.5).sqrt();
                let err = (weighted(&f, r) - exact).abs();
                assert!(err < 1e-8, "n = {n}, r = {r}: {err:e}");
            }
        }
    }

    #[test]
    fn weighted_norm_warns_near_boundary() {
        let g = Grid1D::new(512, 32.0).unwrap();
        let f = Field::from_fn(&g, |x| Complex64::new((-(x - 15.5).powi(2)).exp(), 0.0)).unwrap();
        let w = weighted_norm(&f, 0.5).unwrap();
        assert!(w.value > 0.0);
        assert!(w.warning.is_some());
    }

    #[test]
    fn mixed_norms() {
        let g = Grid1D::new(1024, 64.0).unwrap();
        assert_eq!(mixed_norm(&SpaceTimeField::zeros(&g, 1.0, 8).unwrap(), 4.0, 2.0).unwrap(), 0.0);
        let f = gaussian(&g);
        let frozen = SpaceTimeField::constant(&f, 2.0, 16).unwrap();
        for p in [1.0, 2.0, f64::INFINITY] {
            assert!((mixed_norm(&frozen, f64::INFINITY, p).unwrap() - lp(&f, p)).abs() < 1e-14);
        }
        let decaying = SpaceTimeField::from_fn(1.0, 1024, |t| &f * (-t).exp()).unwrap();
        let expect = lp(&f, 2.0) * ((1.0 - (-4.0f64).exp()) / 4.0).powf(0.25);
        assert!((mixed_norm(&decaying, 4.0, 2.0).unwrap() - expect).abs() < 1e-6);
        assert!(mixed_norm(&decaying, 0.9, 2.0).is_err());
        assert!(mixed_norm(&decaying, 2.0, 0.0).is_err());
    }

    #[test]
    fn triple_norm_of_frozen_field() {
        let g = Grid1D::new(256, 20.0).unwrap();
        let f = gaussian(&g);
        let t = 0.7;
        let frozen = SpaceTimeField::constant(&f, t, 10).unwrap();
        let expect = lp(&f, 2.0) + t.powf(0.25) * f.max_abs();
        assert!((triple_norm(&frozen) - expect).abs() < 1e-12);
        assert_eq!(triple_norm(&SpaceTimeField::zeros(&g, 1.0, 4).unwrap()), 0.0);
    }

    #[test]
    fn y_norm_of_frozen_plane_wave() {
        let g = Grid1D::new(64, 2.0 * PI).unwrap();
        let k = 3.0;
        let f = Field::from_fn(&g, |x| Complex64::from_polar(1.0, k * x)).unwrap();
        let t = 0.5;
        let frozen = SpaceTimeField::constant(&f, t, 8).unwrap();
        let per = (2.0 * PI).sqrt() + t.powf(0.25);
        let expect = (1.0 + k + k * k) * per;
        assert!((y_norm(&frozen) - expect).abs() < 1e-10 * expect);
        let x0 = x_norm(&frozen, 0.0).unwrap();
        assert!((x0 - (expect + (2.0 * PI).sqrt())).abs() < 1e-10 * expect);
        assert_eq!(y_norm(&SpaceTimeField::zeros(&g, 1.0, 4).unwrap()), 0.0);
    }
}
