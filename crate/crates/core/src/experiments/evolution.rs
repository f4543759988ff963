//! Experiments that evolve data with the nonlinear solvers.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::gauge::{constraint_map, constraint_residual, gauge_forward, gauge_inverse};
use crate::grid::Field;
use crate::norms::{hs, mixed, triple_norm, weighted, weighted_sup, x_norm};
use crate::par::map_collect;
use crate::picard::{picard_solve, ContractionDiagnostics, PicardConfig};
use crate::report::{fmt_real, NormReport};
use crate::spacetime::SpaceTimeField;
use crate::spectral::{dx, dxx, low_pass};
use crate::timestepper::{evolve_dnls, evolve_system, Scheme, StepperParams};

use super::inequalities::semigroup_envelope;

fn check_weight(r: f64) -> Result<()> {
    if r > 0.0 && r <= 1.0 {
        Ok(())
    } else {
        Err(invalid("r", format!("weight exponent {r} must lie in (0, 1]")))
    }
}

/// Persistence norms may grow at most this much over the horizon.
pub const PERSISTENCE_GROWTH_LIMIT: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PersistenceReport {
    pub lambda: f64,
    pub norms: NormReport,
    /// `max_t ‖u(t)‖_{H²} / ‖u₀‖_{H²}` (zero for zero data).
    pub h2_growth: f64,
    pub weighted_growth: f64,
    /// Right side of the weighted semigroup estimate for the free flow of
    /// `u₀` at each slice; a bound on `weighted_r` when `λ = 0`.
    pub free_envelope: Vec<f64>,
    pub success: bool,
}

fn growth(initial: f64, peak: f64) -> f64 {
    if initial == 0.0 {
        if peak == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        peak / initial
    }
}

/// Evolves `u₀` by DNLS and records `H²` and weighted norms per slice.
pub fn persistence_experiment(
    u0: &Field,
    lambda: f64,
    r: f64,
    horizon: f64,
    dt: f64,
) -> Result<PersistenceReport> {
    check_weight(r)?;
    let run = evolve_dnls(u0, lambda, horizon, &StepperParams::new(dt, Scheme::Ifrk4Dnls))?;
    let u = run.value;
    let norms = NormReport::new(&u, r)?;
    let first = &norms.slices[0];
    let h2_growth = growth(first.h2, norms.max_h2());
    let weighted_growth = growth(first.weighted_r, norms.max_weighted());
    let times = u.times();
    let free_envelope = map_collect(&times, |&t| semigroup_envelope(u0, r, t))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let finite = norms.slices.iter().all(|s| s.h2.is_finite() && s.weighted_r.is_finite());
    let success = finite && h2_growth <= PERSISTENCE_GROWTH_LIMIT && weighted_growth <= PERSISTENCE_GROWTH_LIMIT;
    Ok(PersistenceReport {
        lambda,
        norms,
        h2_growth,
        weighted_growth,
        free_envelope,
        success,
    })
}

impl PersistenceReport {
    /// `weighted_r(t) / envelope(t)` per slice.
    pub fn envelope_ratios(&self) -> Vec<f64> {
        self.norms
            .slices
            .iter()
            .zip(&self.free_envelope)
            .map(|(s, &e)| if s.weighted_r == 0.0 { 0.0 } else { s.weighted_r / e })
            .collect()
    }
}

/// Largest relative gap between the `h2` and `weighted_r` curves of two
/// reports on the same time mesh.
pub fn curve_distance(a: &NormReport, b: &NormReport) -> Result<f64> {
    if a.slices.len() != b.slices.len()
        || a.slices.iter().zip(&b.slices).any(|(x, y)| (x.t - y.t).abs() > 1e-12)
    {
        return Err(invalid("reports", "curves sampled on different time meshes"));
    }
    let rel = |x: f64, y: f64| {
        let scale = x.abs().max(y.abs());
        if scale == 0.0 {
            0.0
        } else {
            (x - y).abs() / scale
        }
    };
    Ok(a.slices
        .iter()
        .zip(&b.slices)
        .map(|(x, y)| rel(x.h2, y.h2).max(rel(x.weighted_r, y.weighted_r)))
        .fold(0.0, f64::max))
}

/// Residual above which a run is flagged as not constrained.
pub const CONSTRAINT_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum ConstraintStatus {
    Constrained,
    NonConstrained,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstraintReport {
    pub times: Vec<f64>,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub status: ConstraintStatus,
}

impl ConstraintReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,constraint_residual\n");
        for (t, r) in self.times.iter().zip(&self.residuals) {
            let _ = writeln!(out, "{},{}", fmt_real(*t), fmt_real(*r));
        }
        out
    }
}

/// Runs the split-step solver from `(φ₀, ψ₀)` and tracks the constraint.
pub fn constraint_propagation_from(
    phi0: &Field,
    psi0: &Field,
    lambda: f64,
    horizon: f64,
    dt: f64,
) -> Result<ConstraintReport> {
    let run = evolve_system(phi0, psi0, lambda, horizon, &StepperParams::new(dt, Scheme::SplitstepSystem))?;
    let (phi, psi) = run.value;
    let indices: Vec<usize> = (0..=phi.steps()).collect();
    let residuals = map_collect(&indices, |&m| constraint_residual(phi.slice(m), psi.slice(m), lambda))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(ConstraintReport {
        times: phi.times(),
        residuals,
        max_residual,
        status: if max_residual <= CONSTRAINT_TOLERANCE {
            ConstraintStatus::Constrained
        } else {
            ConstraintStatus::NonConstrained
        },
    })
}

/// Builds `ψ₀ = ∂xφ₀ + i(λ/2)|φ₀|²φ₀` and tracks the constraint in time.
pub fn constraint_propagation_experiment(
    phi0: &Field,
    lambda: f64,
    horizon: f64,
    dt: f64,
) -> Result<ConstraintReport> {
    constraint_propagation_from(phi0, &constraint_map(phi0, lambda), lambda, horizon, dt)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstraintRefinement {
    pub coarse: ConstraintReport,
    pub fine: ConstraintReport,
    /// `max residual(dt) / max residual(dt/2)`.
    pub reduction: f64,
}

pub fn constraint_refinement(phi0: &Field, lambda: f64, horizon: f64, dt: f64) -> Result<ConstraintRefinement> {
    let coarse = constraint_propagation_experiment(phi0, lambda, horizon, dt)?;
    let fine = constraint_propagation_experiment(phi0, lambda, horizon, dt / 2.0)?;
    let reduction = coarse.max_residual / fine.max_residual;
    Ok(ConstraintRefinement {
        coarse,
        fine,
        reduction,
    })
}

fn solve_constrained(phi0: &Field, lambda: f64, horizon: f64, dt: f64) -> Result<(Field, SpaceTimeField, SpaceTimeField)> {
    let psi0 = constraint_map(phi0, lambda);
    let run = evolve_system(phi0, &psi0, lambda, horizon, &StepperParams::new(dt, Scheme::SplitstepSystem))?;
    let (phi, psi) = run.value;
    Ok((psi0, phi, psi))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AgreementReport {
    /// `‖φ_picard - φ_splitstep‖_{L^∞_T L²}`.
    pub distance: f64,
    pub diagnostics: ContractionDiagnostics,
}

/// Solves the system by Picard iteration and by split-step with `substeps`
/// steps per Picard time step, and compares `φ` on the Picard mesh.
pub fn picard_vs_stepper(
    phi0: &Field,
    psi0: &Field,
    config: &PicardConfig,
    substeps: usize,
) -> Result<AgreementReport> {
    if substeps == 0 {
        return Err(invalid("substeps", "must be at least 1"));
    }
    let sol = picard_solve(phi0, psi0, config)?;
    let dt = config.horizon / (config.time_steps * substeps) as f64;
    let run = evolve_system(phi0, psi0, config.lambda, config.horizon, &StepperParams::new(dt, Scheme::SplitstepSystem))?;
    let stepped = run.value.0;
    let picked: Vec<Field> = (0..=config.time_steps)
        .map(|m| stepped.slice(m * substeps).clone())
        .collect();
    let stepped = SpaceTimeField::new(config.horizon, picked)?;
    let distance = mixed(&sol.phi.difference(&stepped), f64::INFINITY, 2.0);
    Ok(AgreementReport {
        distance,
        diagnostics: sol.diagnostics,
    })
}

/// `‖φ₀‖_{H¹} + ‖ψ₀‖_{H¹} + ‖|x|^r φ₀‖`.
pub fn data_size(phi0: &Field, psi0: &Field, r: f64) -> f64 {
    hs(phi0, 1.0) + hs(psi0, 1.0) + weighted(phi0, r)
}

/// `⦀F⦀ + ⦀∂xF⦀ + ⦀∂x²F⦀`, or without the last term.
fn derivative_triples(f: &SpaceTimeField, second: bool) -> f64 {
    let mut total = triple_norm(f) + triple_norm(&f.map(dx));
    if second {
        total += triple_norm(&f.map(dxx));
    }
    total
}

/// Left side of the a-priori bound for the system:
/// `⦀φ⦀ + ⦀∂xφ⦀ + ⦀∂x²φ⦀ + ⦀ψ⦀ + ⦀∂xψ⦀ + ‖|x|^r φ‖_{L^∞_T L²}`.
pub fn system_bound_lhs(phi: &SpaceTimeField, psi: &SpaceTimeField, r: f64) -> f64 {
    derivative_triples(phi, true) + derivative_triples(psi, false) + weighted_sup(phi, r)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AprioriReport {
    pub rho: f64,
    pub lhs: f64,
}

/// Evaluates the a-priori bound on the split-step solution for constrained
/// data built from `φ₀`.
pub fn apriori_bound(phi0: &Field, lambda: f64, r: f64, horizon: f64, dt: f64) -> Result<AprioriReport> {
    check_weight(r)?;
    let (psi0, phi, psi) = solve_constrained(phi0, lambda, horizon, dt)?;
    Ok(AprioriReport {
        rho: data_size(phi0, &psi0, r),
        lhs: system_bound_lhs(&phi, &psi, r),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LipschitzReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Compares the solution distance with the data distance for two
/// constrained data sets `φ₀`, `φ̃₀`.
pub fn lipschitz_data_experiment(
    phi0: &Field,
    phi0_tilde: &Field,
    lambda: f64,
    r: f64,
    horizon: f64,
    dt: f64,
) -> Result<LipschitzReport> {
    check_weight(r)?;
    phi0.check_grid(phi0_tilde)?;
    let (psi0, phi, psi) = solve_constrained(phi0, lambda, horizon, dt)?;
    let (psi0_t, phi_t, psi_t) = solve_constrained(phi0_tilde, lambda, horizon, dt)?;
    let lhs = system_bound_lhs(&phi.difference(&phi_t), &psi.difference(&psi_t), r);
    let rhs = data_size(&(phi0 - phi0_tilde), &(&psi0 - &psi0_t), r);
    let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
    Ok(LipschitzReport { lhs, rhs, ratio })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelPair {
    /// Index of the coarser level.
    pub level: usize,
    /// `X_T` distance of the reconstructed solutions `u^{(j)}`, `u^{(j+1)}`.
    pub lhs: f64,
    /// `‖φ₀^{(j)} - φ₀^{(j+1)}‖_{H²} + ‖|x|^r(φ₀^{(j)} - φ₀^{(j+1)})‖`.
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproximationTable {
    pub cutoffs: Vec<f64>,
    /// Data size of each approximant.
    pub rho: Vec<f64>,
    pub rho_max: f64,
    pub pairs: Vec<LevelPair>,
    /// Consecutive solution distances strictly decrease (or are all zero).
    pub cauchy: bool,
    /// `max ratio / min ratio` over pairs with a nonzero right side.
    pub ratio_spread: f64,
}

impl ApproximationTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,cutoff,rho,lhs,rhs,ratio\n");
        for p in &self.pairs {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                p.level,
                fmt_real(self.cutoffs[p.level]),
                fmt_real(self.rho[p.level]),
                fmt_real(p.lhs),
                fmt_real(p.rhs),
                fmt_real(p.ratio)
            );
        }
        out
    }
}

/// Low-pass cutoffs `ξ_max · 2^{j+1-levels}`, coarsest first.
pub fn level_cutoffs(max_wavenumber: f64, levels: usize) -> Vec<f64> {
    (0..levels)
        .map(|j| max_wavenumber * 0.5f64.powi((levels - 1 - j) as i32))
        .collect()
}

/// Smooth approximants of the gauged data, each solved as a constrained
/// system and mapped back to DNLS variables.
pub fn approximation_sequence_experiment(
    u0: &Field,
    lambda: f64,
    r: f64,
    horizon: f64,
    levels: usize,
    dt: f64,
) -> Result<ApproximationTable> {
    check_weight(r)?;
    if levels < 3 {
        return Err(invalid("levels", format!("{levels} must be at least 3")));
    }
    let phi0 = gauge_forward(u0, lambda).value;
    let cutoffs = level_cutoffs(u0.grid().max_wavenumber(), levels);
    let solved = map_collect(&cutoffs, |&c| -> Result<(Field, f64, SpaceTimeField)> {
        let approx = low_pass(&phi0, c);
        let (psi0, phi, _) = solve_constrained(&approx, lambda, horizon, dt)?;
        let rho = data_size(&approx, &psi0, r);
        let u = phi.map(|s| gauge_inverse(s, lambda).value);
        Ok((approx, rho, u))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let rho: Vec<f64> = solved.iter().map(|s| s.1).collect();
    let mut pairs = Vec::with_capacity(levels - 1);
    for (j, w) in solved.windows(2).enumerate() {
        let lhs = x_norm(&w[0].2.difference(&w[1].2), r)?;
        let d0 = &w[0].0 - &w[1].0;
        let rhs = hs(&d0, 2.0) + weighted(&d0, r);
        let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
        pairs.push(LevelPair { level: j, lhs, rhs, ratio });
    }
    let cauchy = pairs
        .windows(2)
        .all(|w| w[1].lhs < w[0].lhs || (w[0].lhs == 0.0 && w[1].lhs == 0.0));
    let live: Vec<f64> = pairs.iter().filter(|p| p.rhs > 0.0).map(|p| p.ratio).collect();
    let ratio_spread = if live.is_empty() {
        1.0
    } else {
        live.iter().copied().fold(0.0, f64::max) / live.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let rho_max = rho.iter().copied().fold(0.0, f64::max);
    Ok(ApproximationTable {
        cutoffs,
        rho,
        rho_max,
        pairs,
        cauchy,
        ratio_spread,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::data::{gaussian, random_field};
    use crate::grid::Grid1D;
    use num_complex::Complex64;

    #[test]
    fn persistence_of_zero_data() {
        let g = Grid1D::new(128, 32.0).unwrap();
        let rep = persistence_experiment(&Field::zeros(&g), 1.0, 0.5, 0.5, 0.01).unwrap();
        assert!(rep.success);
        assert!(rep.norms.slices.iter().all(|s| s.h2 == 0.0 && s.weighted_r == 0.0));
        assert_eq!(rep.norms.slices.len(), 51);
        assert!(persistence_experiment(&Field::zeros(&g), 1.0, 1.5, 0.5, 0.01).is_err());
    }

    #[test]
    fn free_persistence_stays_under_semigroup_envelope() {
        let g = Grid1D::new(512, 64.0).unwrap();
        let u0 = gaussian(&g, 1.0, 1.0, 0.0).unwrap();
        let rep = persistence_experiment(&u0, 0.0, 1.0, 0.5, 0.01).unwrap();
        assert!(rep.success);
        assert!(rep.envelope_ratios().iter().all(|&q| q <= 1.0 + 1e-12));
    }

    #[test]
    fn gaussian_persistence_succeeds() {
        let g = Grid1D::new(512, 64.0).unwrap();
        let u0 = gaussian(&g, 1.0, 1.0, 0.0).unwrap();
        let rep = persistence_experiment(&u0, 1.0, 0.5, 0.5, 0.005).unwrap();
        assert!(rep.success, "{} {}", rep.h2_growth, rep.weighted_growth);
        assert_eq!(curve_distance(&rep.norms, &rep.norms).unwrap(), 0.0);
    }

    #[test]
    fn constraint_without_coupling_is_exact() {
        let g = Grid1D::new(256, 32.0).unwrap();
        let phi0 = random_field(&g, 5, 0, 1.0).unwrap();
        let rep = constraint_propagation_experiment(&phi0, 0.0, 0.5, 0.01).unwrap();
        assert!(rep.max_residual <= 1e-10, "{}", rep.max_residual);
        assert_eq!(rep.status, ConstraintStatus::Constrained);
    }

    #[test]
    fn broken_constraint_is_flagged() {
        let g = Grid1D::new(256, 32.0).unwrap();
        let phi0 = gaussian(&g, 0.8, 1.0, 0.0).unwrap();
        let bump = gaussian(&g, 1.0, 1.0, 0.0).unwrap();
        let bump = &bump * (1.0 / crate::norms::l2(&bump));
        let psi0 = &constraint_map(&phi0, 1.0) + &(&bump * 0.1);
        let rep = constraint_propagation_from(&phi0, &psi0, 1.0, 0.5, 0.005).unwrap();
        assert_eq!(rep.status, ConstraintStatus::NonConstrained);
        assert!(rep.residuals.iter().all(|&r| r > 0.01 && r < 1.0), "{:?}", &rep.residuals[..3]);
        assert!(rep.to_csv().starts_with("t,constraint_residual\n"));
    }

    #[test]
    fn identical_data_have_zero_lipschitz_ratio() {
        let g = Grid1D::new(256, 32.0).unwrap();
        let phi0 = gaussian(&g, 0.5, 1.0, 0.0).unwrap();
        let rep = lipschitz_data_experiment(&phi0, &phi0, 1.0, 0.5, 0.2, 0.005).unwrap();
        assert_eq!((rep.lhs, rep.rhs, rep.ratio), (0.0, 0.0, 0.0));
    }

    #[test]
    fn lipschitz_ratios_settle_in_linear_regime() {
        let g = Grid1D::new(256, 32.0).unwrap();
        let phi0 = gaussian(&g, 0.5, 1.0, 0.0).unwrap();
        let bump = Field::from_fn(&g, |x| Complex64::new(0.0, (-(x - 0.5) * (x - 0.5)).exp())).unwrap();
        let ratios: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&eps| {
                let other = &phi0 + &(&bump * eps);
                lipschitz_data_experiment(&phi0, &other, 1.0, 0.5, 0.2, 0.005).unwrap().ratio
            })
            .collect();
        let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
        assert!(hi <= 2.0 * lo, "{ratios:?}");
    }

    #[test]
    fn apriori_bound_grows_with_data_size() {
        let g = Grid1D::new(256, 32.0).unwrap();
        let reps: Vec<AprioriReport> = [0.25, 0.5, 1.0]
            .iter()
            .map(|&a| apriori_bound(&gaussian(&g, a, 1.0, 0.0).unwrap(), 1.0, 0.5, 0.2, 0.005).unwrap())
            .collect();
        for w in reps.windows(2) {
            assert!(w[1].rho > w[0].rho && w[1].lhs >= w[0].lhs);
        }
    }

    #[test]
    fn band_limited_data_give_identical_levels() {
        let g = Grid1D::new(128, 32.0).unwrap();
        // with λ = 0 the gauge is the identity, so φ₀ is as band-limited as u₀
        let k = 2.0 * std::f64::consts::PI / 32.0;
        let u0 = Field::from_fn(&g, |x| Complex64::from_polar(0.3, k * x)).unwrap();
        let table = approximation_sequence_experiment(&u0, 0.0, 0.5, 0.2, 3, 0.02).unwrap();
        assert!(table.pairs.iter().all(|p| p.lhs < 1e-12 && p.rhs < 1e-12));
        let zero = approximation_sequence_experiment(&Field::zeros(&g), 1.0, 0.5, 0.2, 3, 0.02).unwrap();
        assert!(zero.pairs.iter().all(|p| p.lhs == 0.0 && p.rhs == 0.0 && p.ratio == 0.0));
        assert!(zero.cauchy);
        assert_eq!(zero.ratio_spread, 1.0);
        assert!(approximation_sequence_experiment(&u0, 0.0, 0.5, 0.2, 2, 0.02).is_err());
    }

    #[test]
    fn cutoffs_double_up_to_nyquist() {
        assert_eq!(level_cutoffs(16.0, 4), vec![2.0, 4.0, 8.0, 16.0]);
    }
}
