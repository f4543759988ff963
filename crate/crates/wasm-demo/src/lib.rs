//! Browser front-end: three interactive views over the laboratory.
//!
//! Each export returns a flat `Float64Array`; the layouts are documented on
//! the functions and unpacked by `www/main.js`.

use dnls_core::experiments::{check_weighted_semigroup, gaussian};
use dnls_core::gauge::{constraint_map, constraint_residual, gauge_forward};
use dnls_core::norms::lp_norm;
use dnls_core::timestepper::{evolve_dnls, Scheme, StepperParams};
use dnls_core::{Field, Grid1D, Result};
use wasm_bindgen::prelude::*;

/// Largest internal time step used by [`evolve`].
const MAX_DT: f64 = 2e-3;

fn to_js(e: dnls_core::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn datum(n: usize, box_length: f64, amplitude: f64, width: f64, wavenumber: f64) -> Result<Field> {
    gaussian(&Grid1D::new(n, box_length)?, amplitude, width, wavenumber)
}

/// `frames + 1` snapshots of `|u|`, each `n` values, followed by the
/// `frames + 1` values of `‖u(t)‖_{L²}`.
#[allow(clippy::too_many_arguments)]
pub fn evolution_frames(
    n: usize,
    box_length: f64,
    lambda: f64,
    amplitude: f64,
    width: f64,
    wavenumber: f64,
    horizon: f64,
    frames: usize,
) -> Result<Vec<f64>> {
    let u0 = datum(n, box_length, amplitude, width, wavenumber)?;
    let frames = frames.max(1);
    let per_frame = ((horizon / frames as f64) / MAX_DT).ceil().max(1.0) as usize;
    let steps = frames * per_frame;
    let params = StepperParams::new(horizon / steps as f64, Scheme::Ifrk4Dnls);
    let u = evolve_dnls(&u0, lambda, horizon, &params)?.value;
    let picked: Vec<&Field> = (0..=frames).map(|m| u.slice(m * per_frame)).collect();
    let mut out: Vec<f64> = picked.iter().flat_map(|s| s.values().iter().map(|z| z.norm())).collect();
    for s in &picked {
        out.push(lp_norm(s, 2.0)?);
    }
    Ok(out)
}

/// `[|u|, Re φ, Im φ, Re ψ, Im ψ]` (five blocks of `n`) for the gauge
/// transform `φ` of the datum and the constrained `ψ`, then the constraint
/// residual and the total gauge phase `λ‖u‖²`.
pub fn gauge_view(
    n: usize,
    box_length: f64,
    lambda: f64,
    amplitude: f64,
    width: f64,
    wavenumber: f64,
) -> Result<Vec<f64>> {
    let u = datum(n, box_length, amplitude, width, wavenumber)?;
    let phi = gauge_forward(&u, lambda).value;
    let psi = constraint_map(&phi, lambda);
    let mut out: Vec<f64> = u.values().iter().map(|z| z.norm()).collect();
    out.extend(phi.values().iter().map(|z| z.re));
    out.extend(phi.values().iter().map(|z| z.im));
    out.extend(psi.values().iter().map(|z| z.re));
    out.extend(psi.values().iter().map(|z| z.im));
    out.push(constraint_residual(&phi, &psi, lambda)?);
    out.push(lambda * lp_norm(&u, 2.0)?.powi(2));
    Ok(out)
}

/// `samples` triples `(t, lhs, rhs)` of the weighted free-evolution estimate
/// `‖|x|^r e^{it∂²} f‖ ≲ ‖|x|^r f‖ + |t|^r ‖f‖_{H^{2r}}` on `t ∈ (0, t_max]`.
#[allow(clippy::too_many_arguments)]
pub fn semigroup_curve(
    n: usize,
    box_length: f64,
    r: f64,
    amplitude: f64,
    width: f64,
    wavenumber: f64,
    t_max: f64,
    samples: usize,
) -> Result<Vec<f64>> {
    let f = datum(n, box_length, amplitude, width, wavenumber)?;
    let samples = samples.max(1);
    let mut out = Vec::with_capacity(3 * samples);
    for j in 1..=samples {
        let t = t_max * j as f64 / samples as f64;
        let rep = check_weighted_semigroup(&f, r, t)?;
        out.extend([t, rep.lhs, rep.rhs_total()]);
    }
    Ok(out)
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn evolve(
    n: usize,
    box_length: f64,
    lambda: f64,
    amplitude: f64,
    width: f64,
    wavenumber: f64,
    horizon: f64,
    frames: usize,
) -> std::result::Result<Vec<f64>, JsValue> {
    evolution_frames(n, box_length, lambda, amplitude, width, wavenumber, horizon, frames).map_err(to_js)
}

#[wasm_bindgen]
pub fn gauge(
    n: usize,
    box_length: f64,
    lambda: f64,
    amplitude: f64,
    width: f64,
    wavenumber: f64,
) -> std::result::Result<Vec<f64>, JsValue> {
    gauge_view(n, box_length, lambda, amplitude, width, wavenumber).map_err(to_js)
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn semigroup(
    n: usize,
    box_length: f64,
    r: f64,
    amplitude: f64,
    width: f64,
    wavenumber: f64,
    t_max: f64,
    samples: usize,
) -> std::result::Result<Vec<f64>, JsValue> {
    semigroup_curve(n, box_length, r, amplitude, width, wavenumber, t_max, samples).map_err(to_js)
}
