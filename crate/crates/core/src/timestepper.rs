//! Time-integration oracles independent of the Picard path.
//!
//! * [`Scheme::Ifrk4Dnls`] integrates DNLS in Fourier space,
//!   `∂t û = -iξ² û + iλξ (|u|²u)^`, with the linear flow absorbed by an
//!   integrating factor (Lawson RK4).
//! * [`Scheme::SplitstepSystem`] applies Strang splitting to the gauged
//!   system: exact half-step of `e^{it∂²}`, a full RK4 step of the pointwise
//!   pair `∂t φ = -λφ²ψ̄`, `∂t ψ = λψ²φ̄`, then another linear half-step.
//!
//! Both solvers record every step, so the output mesh has `M = ⌈T/dt⌉`
//! steps of size `T/M`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gauge::{constraint_map, gauge_forward};
use crate::grid::{Field, Grid1D};
use crate::guard::{boundary_decay, Guarded};
use crate::norms::l2;
use crate::par::map_collect;
use crate::spacetime::SpaceTimeField;
use crate::spectral::two_thirds_mask;

/// The sup norm may grow at most this much before a run is aborted.
pub const BLOW_UP_FACTOR: f64 = 100.0;

/// Bound on `dt` times the largest linearised nonlinear rate; RK4 is stable
/// on the imaginary axis up to `2√2`.
const RK4_STABILITY: f64 = 2.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Ifrk4Dnls,
    SplitstepSystem,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepperParams {
    pub dt: f64,
    pub scheme: Scheme,
    /// 2/3-rule truncation of the cubic terms.
    pub dealias: bool,
}

impl StepperParams {
    pub fn new(dt: f64, scheme: Scheme) -> Self {
        Self {
            dt,
            scheme,
            dealias: true,
        }
    }

    fn mesh(&self, horizon: f64) -> Result<(usize, f64)> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid("dt", format!("{} must be positive", self.dt)));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(invalid("horizon", format!("{horizon} must be positive")));
        }
        if self.dt > horizon * (1.0 + 1e-12) {
            return Err(invalid("dt", format!("{} exceeds the horizon {horizon}", self.dt)));
        }
        let steps = ((horizon / self.dt) - 1e-9).ceil().max(1.0) as usize;
        Ok((steps, horizon / steps as f64))
    }
}

fn check_stability(rate: f64, h: f64) -> Result<()> {
    if rate * h > RK4_STABILITY {
        return Err(invalid(
            "dt",
            format!(
                "dt = {h:.3e} is above the RK4 stability limit {:.3e} for this data",
                RK4_STABILITY / rate
            ),
        ));
    }
    Ok(())
}

fn check_data(f: &Field) -> Result<()> {
    match f.values().iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
        Some(j) => Err(Error::NonFinite(j)),
        None => Ok(()),
    }
}

struct SupGuard {
    initial: f64,
}

impl SupGuard {
    fn check(&self, time: f64, f: &Field) -> Result<()> {
        let current = if f.is_finite() { f.max_abs() } else { f64::INFINITY };
        if current > BLOW_UP_FACTOR * self.initial || (self.initial == 0.0 && current > 0.0) {
            return Err(Error::BlowUp {
                time,
                initial: self.initial,
                current,
            });
        }
        Ok(())
    }
}

fn to_physical(grid: &Grid1D, spectrum: &[Complex64]) -> Vec<Complex64> {
    let mut buf = spectrum.to_vec();
    grid.fft_inverse(&mut buf);
    let scale = 1.0 / grid.n_points() as f64;
    buf.iter_mut().for_each(|z| *z *= scale);
    buf
}

fn to_spectral(grid: &Grid1D, values: &[Complex64]) -> Vec<Complex64> {
    let mut buf = values.to_vec();
    grid.fft_forward(&mut buf);
    buf
}

/// One Lawson-RK4 stepper for DNLS with a fixed step `h` (of either sign).
struct DnlsStepper {
    grid: Grid1D,
    h: f64,
    half: Vec<Complex64>,
    full: Vec<Complex64>,
    /// `iλξ`, zeroed outside the kept modes.
    coupling: Vec<Complex64>,
}

impl DnlsStepper {
    fn new(grid: &Grid1D, lambda: f64, h: f64, dealias: bool) -> Self {
        let mask = two_thirds_mask(grid);
        let nyq = grid.nyquist_index();
        let xi = grid.wavenumbers();
        let phase = |s: f64| xi.iter().map(|&x| Complex64::from_polar(1.0, -s * x * x)).collect();
        let coupling = xi
            .iter()
            .enumerate()
            .map(|(k, &x)| {
                let kept = if dealias { mask[k] } else { k != nyq };
                if kept {
                    Complex64::new(0.0, lambda * x)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        Self {
            grid: grid.clone(),
            h,
            half: phase(0.5 * h),
            full: phase(h),
            coupling,
        }
    }

    fn nonlinear(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut u = to_physical(&self.grid, v);
        u.iter_mut().for_each(|z| *z *= z.norm_sqr());
        self.grid.fft_forward(&mut u);
        u.iter_mut().zip(&self.coupling).for_each(|(z, c)| *z *= c);
        u
    }

    fn step(&self, v: &mut [Complex64]) {
        let h = self.h;
        let k1 = self.nonlinear(v);
        let a: Vec<Complex64> = (0..v.len())
            .map(|k| self.half[k] * (v[k] + 0.5 * h * k1[k]))
            .collect();
        let k2 = self.nonlinear(&a);
        let b: Vec<Complex64> = (0..v.len())
            .map(|k| self.half[k] * v[k] + 0.5 * h * k2[k])
            .collect();
        let k3 = self.nonlinear(&b);
        let c: Vec<Complex64> = (0..v.len())
            .map(|k| self.full[k] * v[k] + h * self.half[k] * k3[k])
            .collect();
        let k4 = self.nonlinear(&c);
        for k in 0..v.len() {
            v[k] = self.full[k] * v[k]
                + h / 6.0
                    * (self.full[k] * k1[k] + 2.0 * self.half[k] * (k2[k] + k3[k]) + k4[k]);
        }
    }
}

/// Largest wavenumber reached by the nonlinear term.
fn effective_wavenumber(grid: &Grid1D, dealias: bool) -> f64 {
    if dealias {
        grid.max_wavenumber() * 2.0 / 3.0
    } else {
        grid.max_wavenumber()
    }
}

/// One IF-RK4 step of size `dt` (negative `dt` steps backwards).
pub fn step_dnls(u: &Field, lambda: f64, dt: f64, dealias: bool) -> Field {
    let stepper = DnlsStepper::new(u.grid(), lambda, dt, dealias);
    let mut v = to_spectral(u.grid(), u.values());
    stepper.step(&mut v);
    Field::from_raw(u.grid(), to_physical(u.grid(), &v))
}

/// Solves `i ∂t u + ∂x² u = iλ ∂x(|u|²u)` on `[0, T]`.
pub fn evolve_dnls(
    u0: &Field,
    lambda: f64,
    horizon: f64,
    params: &StepperParams,
) -> Result<Guarded<SpaceTimeField>> {
    check_data(u0)?;
    if !lambda.is_finite() {
        return Err(invalid("lambda", "must be finite"));
    }
    let (steps, h) = params.mesh(horizon)?;
    let grid = u0.grid();
    let sup = u0.max_abs();
    check_stability(
        3.0 * lambda.abs() * sup * sup * effective_wavenumber(grid, params.dealias),
        h,
    )?;
    let guard = SupGuard { initial: sup };
    let stepper = DnlsStepper::new(grid, lambda, h, params.dealias);
    let mut v = to_spectral(grid, u0.values());
    let mut slices = Vec::with_capacity(steps + 1);
    slices.push(u0.clone());
    for m in 1..=steps {
        stepper.step(&mut v);
        let u = Field::from_raw(grid, to_physical(grid, &v));
        guard.check(m as f64 * h, &u)?;
        slices.push(u);
    }
    Ok(Guarded {
        value: SpaceTimeField::new(horizon, slices)?,
        warning: boundary_decay(u0),
    })
}

fn pair_rhs(lambda: f64, p: Complex64, q: Complex64) -> (Complex64, Complex64) {
    (-lambda * p * p * q.conj(), lambda * q * q * p.conj())
}

/// Classical RK4 on the pointwise pair ODE.
fn pair_rk4(lambda: f64, h: f64, p: Complex64, q: Complex64) -> (Complex64, Complex64) {
    let (a1, b1) = pair_rhs(lambda, p, q);
    let (a2, b2) = pair_rhs(lambda, p + 0.5 * h * a1, q + 0.5 * h * b1);
    let (a3, b3) = pair_rhs(lambda, p + 0.5 * h * a2, q + 0.5 * h * b2);
    let (a4, b4) = pair_rhs(lambda, p + h * a3, q + h * b3);
    (
        p + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4),
        q + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4),
    )
}

struct SplitStepper {
    grid: Grid1D,
    lambda: f64,
    h: f64,
    half: Vec<Complex64>,
    /// Half-step factor with the 2/3 filter folded in.
    half_filtered: Vec<Complex64>,
}

impl SplitStepper {
    fn new(grid: &Grid1D, lambda: f64, h: f64, dealias: bool) -> Self {
        let scale = 1.0 / grid.n_points() as f64;
        let mask = two_thirds_mask(grid);
        let half: Vec<Complex64> = grid
            .wavenumbers()
            .iter()
            .map(|&x| Complex64::from_polar(scale, -0.5 * h * x * x))
            .collect();
        let filter = dealias && lambda != 0.0;
        let half_filtered = half
            .iter()
            .zip(&mask)
            .map(|(&e, &keep)| if keep || !filter { e } else { Complex64::new(0.0, 0.0) })
            .collect();
        Self {
            grid: grid.clone(),
            lambda,
            h,
            half,
            half_filtered,
        }
    }

    fn linear(&self, buf: &mut [Complex64], factor: &[Complex64]) {
        self.grid.fft_forward(buf);
        buf.iter_mut().zip(factor).for_each(|(z, e)| *z *= e);
        self.grid.fft_inverse(buf);
    }

    fn step(&self, phi: &mut [Complex64], psi: &mut [Complex64]) {
        self.linear(phi, &self.half);
        self.linear(psi, &self.half);
        if self.lambda != 0.0 {
            let nodes: Vec<(Complex64, Complex64)> =
                phi.iter().copied().zip(psi.iter().copied()).collect();
            let (lambda, h) = (self.lambda, self.h);
            let out = map_collect(&nodes, |&(p, q)| pair_rk4(lambda, h, p, q));
            for (j, (p, q)) in out.into_iter().enumerate() {
                phi[j] = p;
                psi[j] = q;
            }
        }
        self.linear(phi, &self.half_filtered);
        self.linear(psi, &self.half_filtered);
    }
}

/// Solves the gauged system by Strang splitting on `[0, T]`.
pub fn evolve_system(
    phi0: &Field,
    psi0: &Field,
    lambda: f64,
    horizon: f64,
    params: &StepperParams,
) -> Result<Guarded<(SpaceTimeField, SpaceTimeField)>> {
    phi0.check_grid(psi0)?;
    check_data(phi0)?;
    check_data(psi0)?;
    if !lambda.is_finite() {
        return Err(invalid("lambda", "must be finite"));
    }
    let (steps, h) = params.mesh(horizon)?;
    let grid = phi0.grid();
    let sup = phi0.max_abs().max(psi0.max_abs());
    check_stability(3.0 * lambda.abs() * sup * sup, h)?;
    let guard_phi = SupGuard {
        initial: phi0.max_abs(),
    };
    let guard_psi = SupGuard {
        initial: psi0.max_abs(),
    };
    let stepper = SplitStepper::new(grid, lambda, h, params.dealias);
    let mut phi = phi0.values().to_vec();
    let mut psi = psi0.values().to_vec();
    let mut phis = vec![phi0.clone()];
    let mut psis = vec![psi0.clone()];
    for m in 1..=steps {
        stepper.step(&mut phi, &mut psi);
        let (a, b) = (Field::from_raw(grid, phi.clone()), Field::from_raw(grid, psi.clone()));
        let t = m as f64 * h;
        guard_phi.check(t, &a)?;
        guard_psi.check(t, &b)?;
        phis.push(a);
        psis.push(b);
    }
    Ok(Guarded {
        value: (
            SpaceTimeField::new(horizon, phis)?,
            SpaceTimeField::new(horizon, psis)?,
        ),
        warning: boundary_decay(phi0).or_else(|| boundary_decay(psi0)),
    })
}

/// Data and horizon for a temporal convergence study. The system scheme is
/// run on the gauged pair `φ₀ = gauge_forward(u₀)`, `ψ₀ = constraint_map(φ₀)`.
#[derive(Clone, Debug)]
pub struct OrderProblem {
    pub u0: Field,
    pub lambda: f64,
    pub horizon: f64,
    /// Coarsest step; the study also runs `dt/2`, `dt/4` and a `dt/16` reference.
    pub dt: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderStudy {
    pub scheme: Scheme,
    /// Final-time L² errors at `dt`, `dt/2`, `dt/4`.
    pub errors: [f64; 3],
    /// `log₂` of the two successive error ratios.
    pub ratios: [f64; 2],
    /// Mean of `ratios`, absent when the errors sit at round-off level.
    pub order: Option<f64>,
    pub at_machine_floor: bool,
}

/// Errors below this multiple of the data norm are treated as round-off.
const FLOOR: f64 = 1e-12;

fn final_state(scheme: Scheme, problem: &OrderProblem, dt: f64) -> Result<Vec<Field>> {
    let params = StepperParams::new(dt, scheme);
    match scheme {
        Scheme::Ifrk4Dnls => {
            let run = evolve_dnls(&problem.u0, problem.lambda, problem.horizon, &params)?;
            Ok(vec![run.value.last().clone()])
        }
        Scheme::SplitstepSystem => {
            let phi0 = gauge_forward(&problem.u0, problem.lambda).value;
            let psi0 = constraint_map(&phi0, problem.lambda);
            let run = evolve_system(&phi0, &psi0, problem.lambda, problem.horizon, &params)?;
            let (phi, psi) = run.value;
            Ok(vec![phi.last().clone(), psi.last().clone()])
        }
    }
}

/// Runs `dt`, `dt/2`, `dt/4` against a `dt/16` reference.
pub fn observed_order(scheme: Scheme, problem: &OrderProblem) -> Result<OrderStudy> {
    let dts = [problem.dt, problem.dt / 2.0, problem.dt / 4.0, problem.dt / 16.0];
    let runs = map_collect(&dts, |&dt| final_state(scheme, problem, dt));
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let reference = &runs[3];
    let distance = |run: &[Field]| -> f64 {
        run.iter().zip(reference).map(|(a, b)| l2(&(a - b))).sum()
    };
    let errors = [distance(&runs[0]), distance(&runs[1]), distance(&runs[2])];
    let ratios = [(errors[0] / errors[1]).log2(), (errors[1] / errors[2]).log2()];
    let scale = reference.iter().map(l2).sum::<f64>().max(1e-300);
    let at_machine_floor = errors[2] <= FLOOR * scale;
    Ok(OrderStudy {
        scheme,
        errors,
        ratios,
        order: (!at_machine_floor).then(|| 0.5 * (ratios[0] + ratios[1])),
        at_machine_floor,
    })
}
