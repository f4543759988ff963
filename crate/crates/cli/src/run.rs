//! Experiment dispatch and artifact emission.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use dnls_core::experiments::{
    approximation_sequence_experiment, constraint_propagation_experiment, inequality_csv, inhomogeneous_ensemble,
    lipschitz_data_experiment, persistence_experiment, picard_vs_stepper, random_field, refinement_check,
    strichartz_ensemble, weighted_semigroup_ensemble, ConstraintStatus, EnsembleSpec, EnsembleSummary,
    InequalityReport, RefinementCheck, StrichartzPair, PERSISTENCE_GROWTH_LIMIT,
};
use dnls_core::gauge::{constraint_map, gauge_forward};
use dnls_core::picard::PicardConfig;
use dnls_core::report::fmt_real;
use dnls_core::timestepper::{observed_order, OrderProblem, Scheme};
use dnls_core::{Field, Grid1D};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Experiment, RunConfig};

/// Largest accepted `‖φ_picard - φ_splitstep‖_{L^∞_T L²}`.
pub const AGREEMENT_TOLERANCE: f64 = 1e-6;
/// Largest accepted max/min spread of approximation-sequence ratios.
pub const RATIO_SPREAD_LIMIT: f64 = 5.0;
/// Largest accepted relative change of the Lipschitz ratio when the perturbation halves.
pub const LIPSCHITZ_STABILITY: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Success,
    AssertionFailure,
    SolverError,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::AssertionFailure => 1,
            Status::SolverError => 2,
        }
    }
}

/// What one experiment produced, before anything touches the disk.
pub struct Artifacts {
    pub csv: String,
    pub summary: Value,
    pub success: bool,
    /// One-line human summary.
    pub headline: String,
}

#[derive(Debug)]
pub struct Outcome {
    pub status: Status,
    pub headline: String,
    pub files: Vec<PathBuf>,
}

pub fn artifact_stem(config: &RunConfig) -> String {
    format!(
        "{}-{}-{}-{}",
        config.experiment,
        config.data.seed,
        config.grid.n,
        config.time.resolved_steps()
    )
}

/// Runs the configured experiment and writes `<stem>.csv`, `<stem>.json` and
/// `manifest.json` into `out`. The manifest is written whatever happens.
pub fn run(config: &RunConfig, out: &Path) -> io::Result<Outcome> {
    fs::create_dir_all(out)?;
    let start = Instant::now();
    let result = execute(config);
    let wall = start.elapsed().as_secs_f64();
    let stem = artifact_stem(config);
    let mut files = Vec::new();
    let (status, headline, error) = match result {
        Ok(art) => {
            let csv = out.join(format!("{stem}.csv"));
            let summary = out.join(format!("{stem}.json"));
            fs::write(&csv, &art.csv)?;
            fs::write(&summary, serde_json::to_string_pretty(&art.summary).expect("summary serialises") + "\n")?;
            files.push(csv);
            files.push(summary);
            let status = if art.success {
                Status::Success
            } else {
                Status::AssertionFailure
            };
            (status, art.headline, Value::Null)
        }
        Err(e) => (
            Status::SolverError,
            format!("solver error: {e}"),
            json!({ "kind": e.kind(), "message": e.to_string() }),
        ),
    };
    let manifest = out.join("manifest.json");
    let names: Vec<String> = files
        .iter()
        .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect();
    let body = json!({
        "config": config,
        "mesh": { "M": config.time.resolved_steps(), "dt": config.time.resolved_dt() },
        "versions": { "dnls-lab": env!("CARGO_PKG_VERSION"), "dnls-core": dnls_core::VERSION },
        "threads": rayon::current_num_threads(),
        "wall_time_seconds": wall,
        "status": status,
        "exit_code": status.exit_code(),
        "headline": headline,
        "error": error,
        "artifacts": names,
    });
    write_manifest(&manifest, &body)?;
    files.push(manifest);
    Ok(Outcome { status, headline, files })
}

/// Manifest for a run that never got as far as a valid configuration.
pub fn write_rejection_manifest(out: &Path, config_text: &str, kind: &str, message: &str) -> io::Result<PathBuf> {
    fs::create_dir_all(out)?;
    let path = out.join("manifest.json");
    let body = json!({
        "config_text": config_text,
        "versions": { "dnls-lab": env!("CARGO_PKG_VERSION"), "dnls-core": dnls_core::VERSION },
        "status": "invalid-config",
        "exit_code": 2,
        "error": { "kind": kind, "message": message },
        "artifacts": [],
    });
    write_manifest(&path, &body)?;
    Ok(path)
}

fn write_manifest(path: &Path, body: &Value) -> io::Result<()> {
    fs::write(path, serde_json::to_string_pretty(body).expect("manifest serialises") + "\n")
}

fn execute(config: &RunConfig) -> dnls_core::Result<Artifacts> {
    let grid = Grid1D::new(config.grid.n, config.grid.box_length)?;
    let u0 = config.data.spec().sample(&grid)?;
    let (lambda, r) = (config.physics.lambda, config.physics.r);
    let horizon = config.time.horizon;
    let dt = config.time.resolved_dt();
    match config.experiment {
        Experiment::Persistence => persistence(&u0, lambda, r, horizon, dt),
        Experiment::Constraint => constraint(&u0, lambda, horizon, dt),
        Experiment::Strichartz => {
            let spec = ensemble_spec(config);
            let runs = StrichartzPair::standard()
                .iter()
                .map(|&pair| {
                    let check = refinement_check(&spec, true, |s| strichartz_ensemble(pair, s))?;
                    Ok((pair.to_string(), strichartz_ensemble(pair, &spec)?, check))
                })
                .collect::<dnls_core::Result<Vec<_>>>()?;
            Ok(ensemble_artifacts(runs))
        }
        Experiment::InhomogStrichartz => {
            let spec = ensemble_spec(config);
            let p = StrichartzPair::standard();
            let runs = [(p[0], p[0]), (p[1], p[2]), (p[2], p[1])]
                .iter()
                .map(|&(p0, p1)| {
                    let check = refinement_check(&spec, true, |s| inhomogeneous_ensemble(p0, p1, s))?;
                    Ok((format!("{p0}{p1}"), inhomogeneous_ensemble(p0, p1, &spec)?, check))
                })
                .collect::<dnls_core::Result<Vec<_>>>()?;
            Ok(ensemble_artifacts(runs))
        }
        Experiment::WeightedSemigroup => {
            let spec = ensemble_spec(config);
            let times = &config.options.times;
            let check = refinement_check(&spec, false, |s| weighted_semigroup_ensemble(r, times, s))?;
            let base = weighted_semigroup_ensemble(r, times, &spec)?;
            Ok(ensemble_artifacts(vec![(format!("r={r}"), base, check)]))
        }
        Experiment::PicardVsStepper => {
            let phi0 = gauge_forward(&u0, lambda).value;
            let psi0 = constraint_map(&phi0, lambda);
            let picard = PicardConfig {
                max_iter: config.options.max_iter,
                tol: config.options.tol,
                time_steps: config.time.resolved_steps(),
                r,
                lambda,
                horizon,
            };
            let rep = picard_vs_stepper(&phi0, &psi0, &picard, config.options.substeps)?;
            let mut csv = String::from("iteration,distance\n");
            for (k, d) in rep.diagnostics.iterate_distances.iter().enumerate() {
                let _ = writeln!(csv, "{k},{}", fmt_real(*d));
            }
            let ratio = rep.diagnostics.contraction_ratio;
            let success = rep.distance <= AGREEMENT_TOLERANCE && ratio < 1.0;
            Ok(Artifacts {
                csv,
                headline: format!(
                    "distance {:.3e} (tol {AGREEMENT_TOLERANCE:e}), contraction ratio {ratio:.3}",
                    rep.distance
                ),
                summary: json!({ "distance": rep.distance, "tolerance": AGREEMENT_TOLERANCE, "diagnostics": rep.diagnostics, "success": success }),
                success,
            })
        }
        Experiment::ApproxSequence => {
            let table = approximation_sequence_experiment(&u0, lambda, r, horizon, config.options.levels, dt)?;
            let success = table.cauchy && table.ratio_spread <= RATIO_SPREAD_LIMIT;
            Ok(Artifacts {
                csv: table.to_csv(),
                headline: format!(
                    "distances decreasing: {}, ratio spread {:.3} (limit {RATIO_SPREAD_LIMIT})",
                    table.cauchy, table.ratio_spread
                ),
                summary: json!({ "table": table, "spread_limit": RATIO_SPREAD_LIMIT, "success": success }),
                success,
            })
        }
        Experiment::Lipschitz => lipschitz(config, &grid, &u0, lambda, r, horizon, dt),
        Experiment::Order => order(&u0, lambda, horizon, dt),
    }
}

fn persistence(u0: &Field, lambda: f64, r: f64, horizon: f64, dt: f64) -> dnls_core::Result<Artifacts> {
    let rep = persistence_experiment(u0, lambda, r, horizon, dt)?;
    Ok(Artifacts {
        csv: rep.norms.to_csv(),
        headline: format!(
            "H² growth {:.4}x, weighted growth {:.4}x (limit {PERSISTENCE_GROWTH_LIMIT}x)",
            rep.h2_growth, rep.weighted_growth
        ),
        summary: json!({
            "lambda": rep.lambda,
            "h2_growth": rep.h2_growth,
            "weighted_growth": rep.weighted_growth,
            "growth_limit": PERSISTENCE_GROWTH_LIMIT,
            "norms": rep.norms.summary,
            "success": rep.success,
        }),
        success: rep.success,
    })
}

fn constraint(u0: &Field, lambda: f64, horizon: f64, dt: f64) -> dnls_core::Result<Artifacts> {
    let phi0 = gauge_forward(u0, lambda).value;
    let rep = constraint_propagation_experiment(&phi0, lambda, horizon, dt)?;
    let success = rep.status == ConstraintStatus::Constrained;
    Ok(Artifacts {
        csv: rep.to_csv(),
        headline: format!("max residual {:.3e}", rep.max_residual),
        summary: json!({ "max_residual": rep.max_residual, "status": rep.status, "success": success }),
        success,
    })
}

fn ensemble_spec(config: &RunConfig) -> EnsembleSpec {
    EnsembleSpec {
        trials: config.options.trials,
        seed: config.data.seed,
        n_points: config.grid.n,
        box_length: config.grid.box_length,
        horizon: config.time.horizon,
        steps: config.time.resolved_steps(),
    }
}

fn ensemble_artifacts(runs: Vec<(String, EnsembleSummary, RefinementCheck)>) -> Artifacts {
    let reports: Vec<InequalityReport> = runs.iter().flat_map(|r| r.1.reports.iter().cloned()).collect();
    let success = runs.iter().all(|r| r.2.stable);
    let headline = runs
        .iter()
        .map(|(label, s, c)| format!("{label} max {:.4} ({})", s.max_ratio, if c.stable { "stable" } else { "unstable" }))
        .collect::<Vec<_>>()
        .join(", ");
    let summary = runs
        .iter()
        .map(|(label, s, c)| json!({ "label": label, "max_ratio": s.max_ratio, "worst_trial": s.worst_trial, "refinement": c }))
        .collect::<Vec<_>>();
    Artifacts {
        csv: inequality_csv(&reports),
        headline,
        summary: json!({ "ensembles": summary, "success": success }),
        success,
    }
}

fn lipschitz(
    config: &RunConfig,
    grid: &Grid1D,
    u0: &Field,
    lambda: f64,
    r: f64,
    horizon: f64,
    dt: f64,
) -> dnls_core::Result<Artifacts> {
    let eps = config.options.perturbation;
    let phi0 = gauge_forward(u0, lambda).value;
    let mut csv = String::from("perturbation,lhs,rhs,ratio\n");
    let mut ratios = Vec::new();
    let mut rows = Vec::new();
    for size in [eps, eps / 2.0] {
        let bump = random_field(grid, config.data.seed, 1, size)?;
        let tilde = gauge_forward(&(u0 + &bump), lambda).value;
        let rep = lipschitz_data_experiment(&phi0, &tilde, lambda, r, horizon, dt)?;
        let _ = writeln!(csv, "{},{},{},{}", fmt_real(size), fmt_real(rep.lhs), fmt_real(rep.rhs), fmt_real(rep.ratio));
        ratios.push(rep.ratio);
        rows.push(json!({ "perturbation": size, "report": rep }));
    }
    let change = (ratios[1] - ratios[0]).abs() / ratios[0].abs().max(ratios[1].abs()).max(f64::MIN_POSITIVE);
    let success = ratios.iter().all(|q| q.is_finite()) && change <= LIPSCHITZ_STABILITY;
    Ok(Artifacts {
        csv,
        headline: format!("ratio {:.4} -> {:.4} as the perturbation halves ({:.1}% change)", ratios[0], ratios[1], 100.0 * change),
        summary: json!({ "runs": rows, "relative_change": change, "tolerance": LIPSCHITZ_STABILITY, "success": success }),
        success,
    })
}

fn order(u0: &Field, lambda: f64, horizon: f64, dt: f64) -> dnls_core::Result<Artifacts> {
    let problem = OrderProblem {
        u0: u0.clone(),
        lambda,
        horizon,
        dt,
    };
    let mut csv = String::from("scheme,dt,error\n");
    let mut studies = Vec::new();
    let mut success = true;
    let mut parts = Vec::new();
    for (scheme, name, expected, tol) in [
        (Scheme::SplitstepSystem, "splitstep_system", 2.0, 0.2),
        (Scheme::Ifrk4Dnls, "ifrk4_dnls", 4.0, 0.3),
    ] {
        let study = observed_order(scheme, &problem)?;
        for (k, e) in study.errors.iter().enumerate() {
            let _ = writeln!(csv, "{name},{},{}", fmt_real(dt / f64::powi(2.0, k as i32)), fmt_real(*e));
        }
        let ok = study.order.is_some_and(|p| (p - expected).abs() <= tol);
        success &= ok;
        parts.push(match study.order {
            Some(p) => format!("{name} {p:.3} ({expected} ± {tol})"),
            None => format!("{name} at round-off, no order measurable"),
        });
        studies.push(json!({ "study": study, "expected": expected, "tolerance": tol, "pass": ok }));
    }
    Ok(Artifacts {
        csv,
        headline: parts.join(", "),
        summary: json!({ "studies": studies, "success": success }),
        success,
    })
}
