//! Duhamel integrals and the Banach fixed-point solver for the cubic system
//!
//! ```text
//! i ∂t φ + ∂x² φ = -iλ φ² ψ̄
//! i ∂t ψ + ∂x² ψ =  iλ ψ² φ̄
//! ```
//!
//! written as `(φ, ψ) = Φ(φ, ψ)` with
//! `Φ(φ, ψ)(t) = e^{it∂²}(φ₀, ψ₀) - λ ∫₀ᵗ e^{i(t-t')∂²}(φ²ψ̄, -ψ²φ̄)(t') dt'`.
//!
//! The prefactor `-λ = -i · (iλ)` is what Duhamel's formula gives for the
//! system above; with `+iλ` the fixed point would solve a different system.
//!
//! The time integral is the composite trapezoid rule over the stored mesh.
//! The iteration distance is measured in the discrete `X_T × X_T` norm.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::grid::{Field, Grid1D};
use crate::norms::{hs, l2, weighted, x_pair_norm};
use crate::par::map_collect;
use crate::spacetime::SpaceTimeField;
use crate::spectral::{dxx, free_propagator};

/// Iterates whose distance exceeds this multiple of the first distance are
/// treated as divergent.
const DIVERGENCE_FACTOR: f64 = 1e8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PicardConfig {
    pub max_iter: usize,
    /// Stopping threshold on `‖Φ(w) - w‖_{X_T × X_T}`.
    pub tol: f64,
    /// Number of time steps `M` (the mesh has `M + 1` slices).
    pub time_steps: usize,
    pub r: f64,
    pub lambda: f64,
    pub horizon: f64,
}

impl PicardConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter < 1 {
            return Err(invalid("max_iter", "must be at least 1"));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(invalid("tol", format!("{} must be positive", self.tol)));
        }
        if self.time_steps < 2 {
            return Err(invalid("time_steps", format!("{} must be at least 2", self.time_steps)));
        }
        if !(self.r > 0.0 && self.r <= 1.0) {
            return Err(invalid("r", format!("{} must lie in (0, 1]", self.r)));
        }
        if !self.lambda.is_finite() {
            return Err(invalid("lambda", "must be finite"));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(invalid("horizon", format!("{} must be positive", self.horizon)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContractionDiagnostics {
    /// `‖φ₀‖_{H²} + ‖ψ₀‖_{H²} + ‖|x|^r φ₀‖ + ‖|x|^r ψ₀‖` (unit constant).
    pub a_estimate: f64,
    /// `d_k = ‖Φ^{k+1} - Φ^k‖_{X_T × X_T}`.
    pub iterate_distances: Vec<f64>,
    /// `max_k d_{k+1} / d_k`; may exceed one.
    pub contraction_ratio: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl ContractionDiagnostics {
    fn from_distances(a_estimate: f64, distances: Vec<f64>, converged: bool) -> Self {
        let contraction_ratio = contraction_ratio(&distances);
        Self {
            a_estimate,
            iterations: distances.len(),
            iterate_distances: distances,
            contraction_ratio,
            converged,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("diagnostics serialise")
    }
}

fn contraction_ratio(d: &[f64]) -> f64 {
    d.windows(2)
        .filter(|w| w[0] > 0.0 && w[0].is_finite() && w[1].is_finite())
        .map(|w| w[1] / w[0])
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug)]
pub struct PicardSolution {
    pub phi: SpaceTimeField,
    pub psi: SpaceTimeField,
    pub diagnostics: ContractionDiagnostics,
}

/// `∫₀^{t_m} e^{i(t_m - t')∂²} F(t') dt'` by the trapezoid rule, evaluated
/// directly as a weighted sum of propagated slices.
pub fn duhamel_integral(f: &SpaceTimeField, t_index: usize) -> Result<Field> {
    duhamel_direct(f, t_index, 1.0)
}

/// Same integral with the dispersion coefficient scaled by `dispersion`
/// (`0` turns the propagator into the identity).
pub(crate) fn duhamel_direct(f: &SpaceTimeField, t_index: usize, dispersion: f64) -> Result<Field> {
    let steps = f.steps();
    if t_index > steps {
        return Err(Error::TimeIndexOutOfRange {
            index: t_index,
            max: steps,
        });
    }
    let grid = f.grid();
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.n_points()];
    if t_index == 0 {
        return Ok(Field::from_raw(grid, acc));
    }
    let dt = f.dt();
    let t = f.time(t_index);
    for j in 0..=t_index {
        let w = if j == 0 || j == t_index { 0.5 * dt } else { dt };
        let propagated = free_propagator(f.slice(j), dispersion * (t - f.time(j)));
        for (a, v) in acc.iter_mut().zip(propagated.values()) {
            *a += w * v;
        }
    }
    Ok(Field::from_raw(grid, acc))
}

fn forward_spectra(slices: &[Field]) -> Vec<Vec<Complex64>> {
    map_collect(slices, |s| {
        let mut buf = s.values().to_vec();
        s.grid().fft_forward(&mut buf);
        buf
    })
}

fn inverse_spectra(grid: &Grid1D, spectra: Vec<Vec<Complex64>>) -> Vec<Field> {
    let scale = 1.0 / grid.n_points() as f64;
    map_collect(&spectra, |c| {
        let mut buf: Vec<Complex64> = c.iter().map(|z| z * scale).collect();
        grid.fft_inverse(&mut buf);
        Field::from_raw(grid, buf)
    })
}

/// Raw-FFT spectra of `initial_term(t_m) + coupling · ∫₀^{t_m} e^{i(t_m-t')∂²} F dt'`
/// for every `m`, via the recursion `A_m = e^{-iΔtξ²} A_{m-1} + F̂_m`.
fn duhamel_recursive(
    grid: &Grid1D,
    forcing: &[Vec<Complex64>],
    dt: f64,
    coupling: Complex64,
    initial: Option<&[Complex64]>,
) -> Vec<Vec<Complex64>> {
    let n = grid.n_points();
    let step: Vec<Complex64> = (0..n)
        .map(|k| {
            let xi = grid.wavenumber(k);
            Complex64::from_polar(1.0, -dt * xi * xi)
        })
        .collect();
    let mut free: Vec<Complex64> = match initial {
        Some(c) => c.to_vec(),
        None => vec![Complex64::new(0.0, 0.0); n],
    };
    let mut acc: Vec<Complex64> = forcing[0].iter().map(|z| 0.5 * z).collect();
    let mut out = Vec::with_capacity(forcing.len());
    out.push(free.clone());
    for f_m in &forcing[1..] {
        for k in 0..n {
            acc[k] = step[k] * acc[k] + f_m[k];
            free[k] *= step[k];
        }
        out.push(
            (0..n)
                .map(|k| free[k] + coupling * dt * (acc[k] - 0.5 * f_m[k]))
                .collect(),
        );
    }
    out
}

/// All slices of the Duhamel integral at once (recursive evaluation).
pub fn duhamel_family(f: &SpaceTimeField) -> SpaceTimeField {
    let grid = f.grid();
    let spectra = forward_spectra(f.slices());
    let out = duhamel_recursive(grid, &spectra, f.dt(), Complex64::new(1.0, 0.0), None);
    SpaceTimeField::new(f.horizon(), inverse_spectra(grid, out)).expect("same mesh")
}

/// Precomputed data of the map `Φ` for fixed initial data.
struct DuhamelMap {
    grid: Grid1D,
    horizon: f64,
    steps: usize,
    dt: f64,
    lambda: f64,
    phi0: Field,
    psi0: Field,
    phi0_hat: Vec<Complex64>,
    psi0_hat: Vec<Complex64>,
}

impl DuhamelMap {
    fn new(phi0: &Field, psi0: &Field, lambda: f64, horizon: f64, steps: usize) -> Result<Self> {
        phi0.check_grid(psi0)?;
        let grid = phi0.grid().clone();
        let mut phi0_hat = phi0.values().to_vec();
        let mut psi0_hat = psi0.values().to_vec();
        grid.fft_forward(&mut phi0_hat);
        grid.fft_forward(&mut psi0_hat);
        Ok(Self {
            grid,
            horizon,
            steps,
            dt: horizon / steps as f64,
            lambda,
            phi0: phi0.clone(),
            psi0: psi0.clone(),
            phi0_hat,
            psi0_hat,
        })
    }

    fn free_evolution(&self) -> (SpaceTimeField, SpaceTimeField) {
        let zero = vec![vec![Complex64::new(0.0, 0.0); self.grid.n_points()]; self.steps + 1];
        let c = Complex64::new(0.0, 0.0);
        let phi = duhamel_recursive(&self.grid, &zero, self.dt, c, Some(&self.phi0_hat));
        let psi = duhamel_recursive(&self.grid, &zero, self.dt, c, Some(&self.psi0_hat));
        (self.assemble(phi, &self.phi0), self.assemble(psi, &self.psi0))
    }

    /// Slice 0 is the data itself, not its FFT round trip.
    fn assemble(&self, spectra: Vec<Vec<Complex64>>, data: &Field) -> SpaceTimeField {
        let mut slices = inverse_spectra(&self.grid, spectra);
        slices[0] = data.clone();
        SpaceTimeField::new(self.horizon, slices).expect("mesh")
    }

    fn apply(&self, phi: &SpaceTimeField, psi: &SpaceTimeField) -> (SpaceTimeField, SpaceTimeField) {
        let pairs: Vec<(&Field, &Field)> = phi.slices().iter().zip(psi.slices()).collect();
        let nonlinear: Vec<(Vec<Complex64>, Vec<Complex64>)> = map_collect(&pairs, |(p, q)| {
            let mut n1: Vec<Complex64> = p
                .values()
                .iter()
                .zip(q.values())
                .map(|(a, b)| a * a * b.conj())
                .collect();
            let mut n2: Vec<Complex64> = p
                .values()
                .iter()
                .zip(q.values())
                .map(|(a, b)| -(b * b * a.conj()))
                .collect();
            self.grid.fft_forward(&mut n1);
            self.grid.fft_forward(&mut n2);
            (n1, n2)
        });
        let (n1, n2): (Vec<_>, Vec<_>) = nonlinear.into_iter().unzip();
        let coupling = Complex64::new(-self.lambda, 0.0);
        let phi_new = duhamel_recursive(&self.grid, &n1, self.dt, coupling, Some(&self.phi0_hat));
        let psi_new = duhamel_recursive(&self.grid, &n2, self.dt, coupling, Some(&self.psi0_hat));
        (self.assemble(phi_new, &self.phi0), self.assemble(psi_new, &self.psi0))
    }
}

/// One application of `Φ` to the pair `(φ, ψ)` for data `(φ₀, ψ₀)`:
/// free evolution plus the Duhamel integrals of `φ²ψ̄` and `-ψ²φ̄` under the
/// common prefactor `-λ`.
pub fn phi_map(
    phi: &SpaceTimeField,
    psi: &SpaceTimeField,
    phi0: &Field,
    psi0: &Field,
    lambda: f64,
) -> Result<(SpaceTimeField, SpaceTimeField)> {
    if !phi.same_mesh(psi) || phi.grid() != phi0.grid() {
        return Err(Error::GridMismatch);
    }
    let map = DuhamelMap::new(phi0, psi0, lambda, phi.horizon(), phi.steps())?;
    Ok(map.apply(phi, psi))
}

/// Free evolution `(e^{it∂²}φ₀, e^{it∂²}ψ₀)` on the mesh of `config`.
pub fn free_pair(phi0: &Field, psi0: &Field, horizon: f64, steps: usize) -> Result<(SpaceTimeField, SpaceTimeField)> {
    Ok(DuhamelMap::new(phi0, psi0, 0.0, horizon, steps)?.free_evolution())
}

pub fn a_estimate(phi0: &Field, psi0: &Field, r: f64) -> f64 {
    hs(phi0, 2.0) + hs(psi0, 2.0) + weighted(phi0, r) + weighted(psi0, r)
}

/// Picard iteration started from the free evolution of the data.
pub fn picard_solve(phi0: &Field, psi0: &Field, config: &PicardConfig) -> Result<PicardSolution> {
    config.validate()?;
    let (phi, psi) = free_pair(phi0, psi0, config.horizon, config.time_steps)?;
    picard_solve_from(phi0, psi0, phi, psi, config)
}

/// Picard iteration started from an arbitrary seed pair on the config's mesh.
pub fn picard_solve_from(
    phi0: &Field,
    psi0: &Field,
    seed_phi: SpaceTimeField,
    seed_psi: SpaceTimeField,
    config: &PicardConfig,
) -> Result<PicardSolution> {
    config.validate()?;
    if seed_phi.steps() != config.time_steps || !seed_phi.same_mesh(&seed_psi) {
        return Err(invalid("seed", "seed pair does not match the configured mesh"));
    }
    let map = DuhamelMap::new(phi0, psi0, config.lambda, config.horizon, config.time_steps)?;
    let a = a_estimate(phi0, psi0, config.r);
    let (mut phi, mut psi) = (seed_phi, seed_psi);
    let mut distances = Vec::new();
    for _ in 0..config.max_iter {
        let (next_phi, next_psi) = map.apply(&phi, &psi);
        let d = x_pair_norm(&next_phi.difference(&phi), &next_psi.difference(&psi), config.r)?;
        distances.push(d);
        let diverged = !d.is_finite() || d > DIVERGENCE_FACTOR * distances[0].max(f64::MIN_POSITIVE);
        if diverged {
            break;
        }
        phi = next_phi;
        psi = next_psi;
        if d <= config.tol {
            return Ok(PicardSolution {
                phi,
                psi,
                diagnostics: ContractionDiagnostics::from_distances(a, distances, true),
            });
        }
    }
    let diag = ContractionDiagnostics::from_distances(a, distances, false);
    Err(Error::NonConvergence {
        iterations: diag.iterations,
        ratio: diag.contraction_ratio,
    })
}

/// Halves the horizon until Picard converges; gives up after 10 halvings.
pub fn adaptive_horizon(phi0: &Field, psi0: &Field, config: &PicardConfig) -> Result<(PicardSolution, f64)> {
    config.validate()?;
    const MAX_HALVINGS: u32 = 10;
    let mut horizon = config.horizon;
    for halving in 0..=MAX_HALVINGS {
        horizon = config.horizon / f64::powi(2.0, halving as i32);
        let trial = PicardConfig {
            horizon,
            ..config.clone()
        };
        match picard_solve(phi0, psi0, &trial) {
            Ok(sol) => return Ok((sol, horizon)),
            Err(Error::NonConvergence { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::HorizonExhausted {
        halvings: MAX_HALVINGS,
        last_horizon: horizon,
    })
}

/// Largest per-slice residual `‖R_φ‖ + ‖R_ψ‖` of the differential system,
/// with `∂t` replaced by centred differences at interior slices.
pub fn system_residual(phi: &SpaceTimeField, psi: &SpaceTimeField, lambda: f64) -> f64 {
    let dt = phi.dt();
    let i = Complex64::new(0.0, 1.0);
    let il = Complex64::new(0.0, lambda);
    let interior: Vec<usize> = (1..phi.steps()).collect();
    let per_slice = map_collect(&interior, |&m| {
        let (p, q) = (phi.slice(m), psi.slice(m));
        let (dp, dq) = (dxx(p), dxx(q));
        let mut r_phi = Vec::with_capacity(p.len());
        let mut r_psi = Vec::with_capacity(p.len());
        for j in 0..p.len() {
            let a = p.values()[j];
            let b = q.values()[j];
            let pt = (phi.slice(m + 1).values()[j] - phi.slice(m - 1).values()[j]) / (2.0 * dt);
            let qt = (psi.slice(m + 1).values()[j] - psi.slice(m - 1).values()[j]) / (2.0 * dt);
            r_phi.push(i * pt + dp.values()[j] + il * a * a * b.conj());
            r_psi.push(i * qt + dq.values()[j] - il * b * b * a.conj());
        }
        l2(&Field::from_raw(p.grid(), r_phi)) + l2(&Field::from_raw(p.grid(), r_psi))
    });
    per_slice.into_iter().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::constraint_map;
    use crate::norms::mixed;
    use std::f64::consts::PI;

    fn gaussian(g: &Grid1D, a: f64) -> Field {
        Field::from_fn(g, |x| Complex64::new(a * (-x * x / 2.0).exp(), 0.0)).unwrap()
    }

    fn max_diff(a: &Field, b: &Field) -> f64 {
        a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    fn config(lambda: f64, horizon: f64, steps: usize) -> PicardConfig {
        PicardConfig {
            max_iter: 60,
            tol: 1e-11,
            time_steps: steps,
            r: 0.5,
            lambda,
            horizon,
        }
    }

    #[test]
    fn duhamel_of_zero_and_index_check() {
        let g = Grid1D::new(32, 10.0).unwrap();
        let z = SpaceTimeField::zeros(&g, 1.0, 8).unwrap();
        assert_eq!(duhamel_integral(&z, 5).unwrap().max_abs(), 0.0);
        assert!(matches!(
            duhamel_integral(&z, 9),
            Err(Error::TimeIndexOutOfRange { index: 9, max: 8 })
        ));
    }

    #[test]
    fn duhamel_without_dispersion_is_time_times_field() {
        let g = Grid1D::new(64, 10.0).unwrap();
        let f = gaussian(&g, 1.3);
        let frozen = SpaceTimeField::constant(&f, 0.8, 16).unwrap();
        for m in [0, 1, 7, 16] {
            let d = duhamel_direct(&frozen, m, 0.0).unwrap();
            let expect = &f * frozen.time(m);
            assert!(max_diff(&d, &expect) < 1e-14);
        }
    }

    #[test]
    fn duhamel_of_modulated_plane_wave_matches_scalar_integral() {
        let g = Grid1D::new(64, 2.0 * PI).unwrap();
        let k = 1.0;
        let wave = Field::from_fn(&g, |x| Complex64::from_polar(1.0, k * x)).unwrap();
        let f = SpaceTimeField::from_fn(1.0, 1000, |t| &wave * (-t).exp()).unwrap();
        // ∫₀ᵗ e^{-i(t-s)k²} e^{-s} ds = e^{-ik²t} (e^{(ik²-1)t} - 1) / (ik² - 1)
        let z = Complex64::new(-1.0, k * k);
        for m in [250, 600, 1000] {
            let t = f.time(m);
            let scalar = Complex64::from_polar(1.0, -k * k * t) * ((z * t).exp() - 1.0) / z;
            let expect = &wave * scalar;
            assert!(max_diff(&duhamel_integral(&f, m).unwrap(), &expect) < 1e-6);
        }
    }

    #[test]
    fn recursive_family_agrees_with_direct_sum() {
        let g = Grid1D::new(128, 20.0).unwrap();
        let base = gaussian(&g, 1.0);
        let f = SpaceTimeField::from_fn(0.5, 40, |t| {
            base.map(|z| z * Complex64::new((3.0 * t).cos(), t * t))
        })
        .unwrap();
        let family = duhamel_family(&f);
        for m in [0, 1, 13, 40] {
            assert!(max_diff(family.slice(m), &duhamel_integral(&f, m).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn phi_map_without_coupling_is_free_evolution() {
        let g = Grid1D::new(128, 30.0).unwrap();
        let phi0 = gaussian(&g, 0.7);
        let psi0 = constraint_map(&phi0, 1.0);
        let junk = SpaceTimeField::constant(&gaussian(&g, 3.0), 0.2, 10).unwrap();
        let (p, q) = phi_map(&junk, &junk, &phi0, &psi0, 0.0).unwrap();
        let zero = SpaceTimeField::zeros(&g, 0.2, 10).unwrap();
        let (pz, qz) = phi_map(&zero, &zero, &phi0, &psi0, 2.0).unwrap();
        for m in 0..=10 {
            let t = p.time(m);
            let fp = free_propagator(&phi0, t);
            let fq = free_propagator(&psi0, t);
            assert!(max_diff(p.slice(m), &fp) < 1e-12);
            assert!(max_diff(q.slice(m), &fq) < 1e-12);
            assert!(max_diff(pz.slice(m), &fp) < 1e-12);
            assert!(max_diff(qz.slice(m), &fq) < 1e-12);
        }
    }

    #[test]
    fn zero_coupling_converges_in_one_iteration() {
        let g = Grid1D::new(128, 30.0).unwrap();
        let phi0 = gaussian(&g, 0.5);
        let psi0 = constraint_map(&phi0, 0.0);
        let sol = picard_solve(&phi0, &psi0, &config(0.0, 0.1, 8)).unwrap();
        assert_eq!(sol.diagnostics.iterations, 1);
        assert!(sol.diagnostics.converged);
        assert!(max_diff(sol.phi.slice(0), &phi0) == 0.0);
        assert!(max_diff(sol.psi.last(), &free_propagator(&psi0, 0.1)) < 1e-12);
    }

    #[test]
    fn converged_solution_is_a_fixed_point_and_seed_independent() {
        let g = Grid1D::new(256, 32.0).unwrap();
        let phi0 = gaussian(&g, 0.5);
        let psi0 = constraint_map(&phi0, 1.0);
        let cfg = config(1.0, 0.1, 32);
        let sol = picard_solve(&phi0, &psi0, &cfg).unwrap();
        let d = &sol.diagnostics;
        assert!(d.contraction_ratio < 1.0, "{d:?}");
        for w in d.iterate_distances.windows(2) {
            assert!(w[1] <= d.contraction_ratio * w[0] * 1.05);
        }
        assert!(max_diff(sol.phi.slice(0), &phi0) == 0.0);
        let (p, q) = phi_map(&sol.phi, &sol.psi, &phi0, &psi0, 1.0).unwrap();
        let gap = x_pair_norm(&p.difference(&sol.phi), &q.difference(&sol.psi), 0.5).unwrap();
        assert!(gap <= cfg.tol, "{gap}");

        let zero = SpaceTimeField::zeros(&g, 0.1, 32).unwrap();
        let other = picard_solve_from(&phi0, &psi0, zero.clone(), zero, &cfg).unwrap();
        let sep = x_pair_norm(&other.phi.difference(&sol.phi), &other.psi.difference(&sol.psi), 0.5).unwrap();
        assert!(sep <= 10.0 * cfg.tol, "{sep}");
    }

    #[test]
    fn large_data_does_not_converge() {
        let g = Grid1D::new(256, 32.0).unwrap();
        let phi0 = gaussian(&g, 25.0);
        let psi0 = constraint_map(&phi0, 1.0);
        match picard_solve(&phi0, &psi0, &config(1.0, 1.0, 32)) {
            Err(Error::NonConvergence { ratio, .. }) => assert!(ratio > 1.0, "{ratio}"),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn residual_of_converged_pair_is_second_order() {
        let g = Grid1D::new(256, 32.0).unwrap();
        let phi0 = gaussian(&g, 0.8);
        let psi0 = constraint_map(&phi0, 1.0);
        let res: Vec<f64> = [32, 64]
            .iter()
            .map(|&m| {
                let sol = picard_solve(&phi0, &psi0, &config(1.0, 0.1, m)).unwrap();
                system_residual(&sol.phi, &sol.psi, 1.0)
            })
            .collect();
        let ratio = res[0] / res[1];
        assert!((3.5..=4.5).contains(&ratio), "{res:?}");
    }

    #[test]
    fn adaptive_horizon_cases() {
        let g = Grid1D::new(128, 32.0).unwrap();
        let zero = Field::zeros(&g);
        let (sol, t) = adaptive_horizon(&zero, &zero, &config(1.0, 0.5, 8)).unwrap();
        assert_eq!(t, 0.5);
        assert_eq!(mixed(&sol.phi, f64::INFINITY, 2.0), 0.0);
        let phi0 = gaussian(&g, 0.3);
        let psi0 = constraint_map(&phi0, 1.0);
        let (_, t) = adaptive_horizon(&phi0, &psi0, &config(1.0, 0.05, 8)).unwrap();
        assert_eq!(t, 0.05);
    }

    #[test]
    fn config_validation() {
        let mut c = config(1.0, 0.1, 8);
        assert!(c.validate().is_ok());
        c.time_steps = 1;
        assert!(c.validate().is_err());
        let mut c = config(1.0, 0.1, 8);
        c.r = 0.0;
        assert!(c.validate().is_err());
        let mut c = config(1.0, 0.1, 8);
        c.tol = 0.0;
        assert!(c.validate().is_err());
        let mut c = config(1.0, 0.1, 8);
        c.max_iter = 0;
        assert!(c.validate().is_err());
    }
}
