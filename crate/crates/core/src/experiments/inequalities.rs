//! Numerical checks of the linear estimates for the free Schrödinger group.
//!
//! A "≲" estimate cannot be checked against its hidden constant, so each
//! checker reports the ratio of the two sides and the ensembles ask only that
//! the worst ratio be stable under grid and time refinement.

use std::fmt;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{invalid, Result};
use crate::grid::{Field, Grid1D};
use crate::norms::{l2, mixed, weighted};
use crate::par::map_collect;
use crate::picard::duhamel_family;
use crate::spacetime::SpaceTimeField;
use crate::spectral::{fractional_derivative, free_propagator};

use super::data::{random_field, random_forcing};
use super::{InequalityReport, RhsTerm, TrialMeta};

/// An admissible pair: `2 ≤ p ≤ ∞` and `2/q = 1/2 - 1/p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrichartzPair {
    p: f64,
    q: f64,
}

impl StrichartzPair {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if p.is_nan() || p < 2.0 {
            return Err(invalid("p", format!("{p} must lie in [2, ∞]")));
        }
        let expected = 0.5 - 1.0 / p;
        let actual = 2.0 / q;
        if q.is_nan() || (expected - actual).abs() > 1e-12 {
            return Err(invalid(
                "q",
                format!("({p}, {q}) violates 2/q = 1/2 - 1/p"),
            ));
        }
        Ok(Self { p, q })
    }

    /// The unique admissible `q` for a given `p`.
    pub fn from_p(p: f64) -> Result<Self> {
        let inv = 0.5 - 1.0 / p;
        let q = if inv == 0.0 { f64::INFINITY } else { 2.0 / inv };
        Self::new(p, q)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// The three pairs used by the ensembles: `(∞,4)`, `(2,∞)`, `(4,8)`.
    pub fn standard() -> [StrichartzPair; 3] {
        [
            Self::new(f64::INFINITY, 4.0).expect("admissible"),
            Self::new(2.0, f64::INFINITY).expect("admissible"),
            Self::new(4.0, 8.0).expect("admissible"),
        ]
    }
}

/// Hölder conjugate `e/(e - 1)`, with `1 ↔ ∞`.
pub fn conjugate(e: f64) -> f64 {
    if e.is_infinite() {
        1.0
    } else if e == 1.0 {
        f64::INFINITY
    } else {
        e / (e - 1.0)
    }
}

pub(crate) fn fmt_exponent(e: f64) -> String {
    if e.is_infinite() {
        "inf".into()
    } else {
        format!("{e}")
    }
}

impl fmt::Display for StrichartzPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", fmt_exponent(self.p), fmt_exponent(self.q))
    }
}

impl Serialize for StrichartzPair {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `t ↦ e^{it∂²} f` on the mesh `t_m = mT/M`.
pub fn free_family(f: &Field, horizon: f64, steps: usize) -> Result<SpaceTimeField> {
    let grid = f.grid().clone();
    let mut spectrum = f.values().to_vec();
    grid.fft_forward(&mut spectrum);
    let dt = horizon / steps as f64;
    let indices: Vec<usize> = (0..=steps).collect();
    let slices = map_collect(&indices, |&m| {
        if m == 0 {
            return f.clone();
        }
        let t = m as f64 * dt;
        let scale = 1.0 / grid.n_points() as f64;
        let mut buf: Vec<Complex64> = spectrum
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let xi = grid.wavenumber(k);
                c * Complex64::from_polar(scale, -t * xi * xi)
            })
            .collect();
        grid.fft_inverse(&mut buf);
        Field::new(&grid, buf).expect("finite propagation")
    });
    SpaceTimeField::new(horizon, slices)
}

fn meta(grid: &Grid1D, data_id: impl Into<String>) -> TrialMeta {
    TrialMeta {
        n_points: grid.n_points(),
        box_length: grid.box_length(),
        data_id: data_id.into(),
        seed: None,
        steps: None,
        time: None,
        pairs: Vec::new(),
    }
}

/// `‖e^{it∂²}f‖_{L^q([0,T]; L^p)}` against `‖f‖_{L²}`.
pub fn check_strichartz(
    f: &Field,
    pair: StrichartzPair,
    horizon: f64,
    steps: usize,
) -> Result<InequalityReport> {
    let family = free_family(f, horizon, steps)?;
    let lhs = mixed(&family, pair.q, pair.p);
    let mut meta = meta(f.grid(), "field");
    meta.steps = Some(steps);
    meta.time = Some(horizon);
    meta.pairs = vec![pair];
    Ok(InequalityReport::new(
        "strichartz",
        lhs,
        vec![RhsTerm::new("l2", l2(f))],
        meta,
    ))
}

/// `‖∫₀ᵗ e^{i(t-t')∂²}F(t')dt'‖_{L^{q₁}L^{p₁}}` against `‖F‖_{L^{q₀'}L^{p₀'}}`.
pub fn check_inhomogeneous_strichartz(
    forcing: &SpaceTimeField,
    pair0: StrichartzPair,
    pair1: StrichartzPair,
) -> Result<InequalityReport> {
    let duhamel = duhamel_family(forcing);
    let lhs = mixed(&duhamel, pair1.q, pair1.p);
    let rhs = mixed(forcing, conjugate(pair0.q), conjugate(pair0.p));
    let mut meta = meta(forcing.grid(), "forcing");
    meta.steps = Some(forcing.steps());
    meta.time = Some(forcing.horizon());
    meta.pairs = vec![pair0, pair1];
    Ok(InequalityReport::new(
        "inhomogeneous_strichartz",
        lhs,
        vec![RhsTerm::new("dual_mixed", rhs)],
        meta,
    ))
}

/// `‖|x|^r e^{it∂²}f‖` against `t^{r/2}‖f‖ + t^r‖D^r f‖ + ‖|x|^r f‖`.
pub fn check_weighted_semigroup(f: &Field, r: f64, t: f64) -> Result<InequalityReport> {
    if !(r > 0.0 && r < 1.0) {
        return Err(invalid("r", format!("{r} must lie in (0, 1)")));
    }
    semigroup_report(f, r, t)
}

pub(crate) fn semigroup_report(f: &Field, r: f64, t: f64) -> Result<InequalityReport> {
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid("t", format!("{t} must be positive")));
    }
    let lhs = weighted(&free_propagator(f, t), r);
    let terms = semigroup_terms(f, r, t)?;
    let mut meta = meta(f.grid(), "field");
    meta.time = Some(t);
    Ok(InequalityReport::new("weighted_semigroup", lhs, terms, meta))
}

fn semigroup_terms(f: &Field, r: f64, t: f64) -> Result<Vec<RhsTerm>> {
    Ok(vec![
        RhsTerm::new("mass", t.powf(r / 2.0) * l2(f)),
        RhsTerm::new("fractional", t.powf(r) * l2(&fractional_derivative(f, r)?)),
        RhsTerm::new("weight", weighted(f, r)),
    ])
}

/// Right side of the weighted semigroup estimate, for any `t ≥ 0`.
pub fn semigroup_envelope(f: &Field, r: f64, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(weighted(f, r));
    }
    Ok(semigroup_terms(f, r, t)?.iter().map(|term| term.value).sum())
}

/// Grid, box and time mesh for a seeded ensemble.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnsembleSpec {
    pub trials: usize,
    pub seed: u64,
    pub n_points: usize,
    pub box_length: f64,
    pub horizon: f64,
    pub steps: usize,
}

impl EnsembleSpec {
    fn grid(&self) -> Result<Grid1D> {
        if self.trials == 0 {
            return Err(invalid("trials", "need at least one trial"));
        }
        Grid1D::new(self.n_points, self.box_length)
    }

    pub fn refined_in_space(&self) -> Self {
        Self {
            n_points: 2 * self.n_points,
            ..self.clone()
        }
    }

    pub fn refined_in_time(&self) -> Self {
        Self {
            steps: 2 * self.steps,
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub max_ratio: f64,
    pub worst_trial: usize,
    pub reports: Vec<InequalityReport>,
}

impl EnsembleSummary {
    fn from_reports(reports: Vec<InequalityReport>) -> Self {
        let (worst_trial, max_ratio) = reports
            .iter()
            .map(|r| r.ratio)
            .enumerate()
            .fold((0, 0.0), |best, (i, v)| if v > best.1 { (i, v) } else { best });
        Self {
            max_ratio,
            worst_trial,
            reports,
        }
    }
}

fn run_trials(
    spec: &EnsembleSpec,
    trial: impl Fn(&Grid1D, u64) -> Result<InequalityReport> + Sync + Send,
) -> Result<EnsembleSummary> {
    let grid = spec.grid()?;
    let ids: Vec<u64> = (0..spec.trials as u64).collect();
    let reports = map_collect(&ids, |&i| {
        trial(&grid, i).map(|mut rep| {
            rep.meta.seed = Some(spec.seed);
            rep.meta.data_id = format!("random-{}-{i}", spec.seed);
            rep
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleSummary::from_reports(reports))
}

pub fn strichartz_ensemble(pair: StrichartzPair, spec: &EnsembleSpec) -> Result<EnsembleSummary> {
    run_trials(spec, |grid, i| {
        let f = random_field(grid, spec.seed, i, 1.0)?;
        check_strichartz(&f, pair, spec.horizon, spec.steps)
    })
}

pub fn inhomogeneous_ensemble(
    pair0: StrichartzPair,
    pair1: StrichartzPair,
    spec: &EnsembleSpec,
) -> Result<EnsembleSummary> {
    run_trials(spec, |grid, i| {
        let forcing = random_forcing(grid, spec.seed, i, spec.horizon, spec.steps)?;
        check_inhomogeneous_strichartz(&forcing, pair0, pair1)
    })
}

/// Each trial evaluates the estimate at every time in `times`; the
/// ensemble records one report per (trial, time).
pub fn weighted_semigroup_ensemble(r: f64, times: &[f64], spec: &EnsembleSpec) -> Result<EnsembleSummary> {
    let grid = spec.grid()?;
    let ids: Vec<(u64, usize)> = (0..spec.trials as u64)
        .flat_map(|i| (0..times.len()).map(move |j| (i, j)))
        .collect();
    let reports = map_collect(&ids, |&(i, j)| {
        let f = random_field(&grid, spec.seed, i, 1.0)?;
        check_weighted_semigroup(&f, r, times[j]).map(|mut rep| {
            rep.meta.seed = Some(spec.seed);
            rep.meta.data_id = format!("random-{}-{i}", spec.seed);
            rep
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleSummary::from_reports(reports))
}

/// Relative change of the worst ensemble ratio under `n → 2n` and
/// (optionally) `M → 2M`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RefinementCheck {
    pub base: f64,
    pub grid_refined: f64,
    pub time_refined: Option<f64>,
    pub grid_change: f64,
    pub time_change: Option<f64>,
    /// Both changes within [`REFINEMENT_TOLERANCE`].
    pub stable: bool,
}

pub const REFINEMENT_TOLERANCE: f64 = 0.1;

fn relative_change(base: f64, refined: f64) -> f64 {
    if base == refined {
        0.0
    } else {
        (refined - base).abs() / base.abs().max(refined.abs())
    }
}

pub fn refinement_check(
    spec: &EnsembleSpec,
    include_time: bool,
    ensemble: impl Fn(&EnsembleSpec) -> Result<EnsembleSummary>,
) -> Result<RefinementCheck> {
    let base = ensemble(spec)?.max_ratio;
    let grid_refined = ensemble(&spec.refined_in_space())?.max_ratio;
    let time_refined = if include_time {
        Some(ensemble(&spec.refined_in_time())?.max_ratio)
    } else {
        None
    };
    let grid_change = relative_change(base, grid_refined);
    let time_change = time_refined.map(|t| relative_change(base, t));
    let stable = grid_change <= REFINEMENT_TOLERANCE && time_change.is_none_or(|c| c <= REFINEMENT_TOLERANCE);
    Ok(RefinementCheck {
        base,
        grid_refined,
        time_refined,
        grid_change,
        time_change,
        stable,
    })
}
