//! Run configuration, read from a TOML document.
//!
//! ```toml
//! experiment = "persistence"
//! output_dir = "dnls-out"
//!
//! [grid]
//! n = 1024
//! L = 64.0
//!
//! [time]
//! T = 0.5
//! M = 256        # or dt = ..., not both
//!
//! [physics]
//! lambda = 1.0
//! r = 0.5
//!
//! [data]
//! kind = "gaussian"   # gaussian | plane-wave | random
//! amplitude = 1.0
//! width = 1.0
//! mode = 0.0
//! seed = 42
//! ```
//!
//! Every table is optional and every key has a default; unknown keys are
//! rejected.

use std::fmt;
use std::path::PathBuf;

use dnls_core::experiments::{DataKind, DataSpec};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Persistence,
    Constraint,
    Strichartz,
    InhomogStrichartz,
    WeightedSemigroup,
    PicardVsStepper,
    ApproxSequence,
    Lipschitz,
    Order,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Persistence => "persistence",
            Experiment::Constraint => "constraint",
            Experiment::Strichartz => "strichartz",
            Experiment::InhomogStrichartz => "inhomog-strichartz",
            Experiment::WeightedSemigroup => "weighted-semigroup",
            Experiment::PicardVsStepper => "picard-vs-stepper",
            Experiment::ApproxSequence => "approx-sequence",
            Experiment::Lipschitz => "lipschitz",
            Experiment::Order => "order",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub physics: PhysicsConfig,
    #[serde(default)]
    pub data: DataConfig,
    #[serde(default)]
    pub options: Options,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("dnls-out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub n: usize,
    #[serde(rename = "L")]
    pub box_length: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n: 1024, box_length: 64.0 }
    }
}

/// `M` and `dt` are alternatives; with neither, `M = 256`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeConfig {
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self {
            horizon: 0.5,
            steps: None,
            dt: None,
        }
    }
}

pub const DEFAULT_STEPS: usize = 256;

impl TimeConfig {
    /// Number of time steps after resolving `dt`.
    pub fn resolved_steps(&self) -> usize {
        match (self.steps, self.dt) {
            (Some(m), _) => m,
            (None, Some(dt)) => ((self.horizon / dt) - 1e-9).ceil().max(1.0) as usize,
            (None, None) => DEFAULT_STEPS,
        }
    }

    pub fn resolved_dt(&self) -> f64 {
        self.horizon / self.resolved_steps() as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicsConfig {
    pub lambda: f64,
    pub r: f64,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        Self { lambda: 1.0, r: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataConfig {
    pub kind: DataKind,
    pub amplitude: f64,
    pub width: f64,
    /// Carrier wavenumber (gaussian) or integer box mode (plane-wave).
    pub mode: f64,
    pub seed: u64,
}

impl Default for DataConfig {
    fn default() -> Self {
        let d = DataSpec::default();
        Self {
            kind: d.kind,
            amplitude: d.amplitude,
            width: d.width,
            mode: d.mode,
            seed: d.seed,
        }
    }
}

impl DataConfig {
    pub fn spec(&self) -> DataSpec {
        DataSpec {
            kind: self.kind,
            amplitude: self.amplitude,
            width: self.width,
            mode: self.mode,
            seed: self.seed,
        }
    }
}

/// Knobs used by only some experiments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Options {
    /// Ensemble size for the inequality experiments.
    pub trials: usize,
    /// Evaluation times for weighted-semigroup.
    pub times: Vec<f64>,
    pub max_iter: usize,
    pub tol: f64,
    /// Split-step steps per Picard step in picard-vs-stepper.
    pub substeps: usize,
    pub levels: usize,
    /// Size of the data perturbation in lipschitz.
    pub perturbation: f64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            trials: 100,
            times: vec![0.1, 1.0, 5.0],
            max_iter: 60,
            tol: 1e-10,
            substeps: 4,
            levels: 5,
            perturbation: 1e-3,
        }
    }
}

/// One rejected field.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldIssue {
    /// Dotted path, e.g. `physics.r`.
    pub field: String,
    /// 1-based line in the source document, when the key was written out.
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for FieldIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}: {}", self.field, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Parse(String),
    #[error("invalid configuration:\n{}", issues.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n"))]
    Invalid { issues: Vec<FieldIssue> },
}

impl ConfigError {
    pub fn issues(&self) -> &[FieldIssue] {
        match self {
            ConfigError::Invalid { issues } => issues,
            ConfigError::Parse(_) => &[],
        }
    }
}

/// Parses and validates a TOML document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let config: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    config.validate_source(Some(text))?;
    Ok(config)
}

pub fn to_toml(config: &RunConfig) -> String {
    toml::to_string(config).expect("config serialises")
}

/// 1-based line of `key = ...` inside `[table]` (or the root when `table` is empty).
fn locate(text: &str, table: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim().to_string();
            continue;
        }
        if current == table {
            if let Some((k, _)) = line.split_once('=') {
                let k = k.trim().trim_matches('"');
                if k == key {
                    return Some(i + 1);
                }
            }
        }
    }
    None
}

struct Issues<'a> {
    source: Option<&'a str>,
    list: Vec<FieldIssue>,
}

impl Issues<'_> {
    fn push(&mut self, table: &str, key: &str, message: String) {
        let field = if table.is_empty() {
            key.to_string()
        } else {
            format!("{table}.{key}")
        };
        let line = self.source.and_then(|s| locate(s, table, key));
        self.list.push(FieldIssue { field, line, message });
    }
}

fn positive(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.validate_source(None)
    }

    fn validate_source(&self, source: Option<&str>) -> Result<(), ConfigError> {
        let mut v = Issues { source, list: Vec::new() };
        let g = &self.grid;
        if !(16..=1 << 16).contains(&g.n) || !g.n.is_power_of_two() {
            v.push("grid", "n", format!("{} must be a power of two in [16, 65536]", g.n));
        }
        if !positive(g.box_length) {
            v.push("grid", "L", format!("{} must be positive and finite", g.box_length));
        }
        let t = &self.time;
        if !positive(t.horizon) {
            v.push("time", "T", format!("{} must be positive and finite", t.horizon));
        }
        match (t.steps, t.dt) {
            (Some(_), Some(_)) => v.push("time", "dt", "give either M or dt, not both".into()),
            (Some(0), None) => v.push("time", "M", "must be at least 1".into()),
            (None, Some(dt)) if !positive(dt) || (positive(t.horizon) && dt > t.horizon) => {
                v.push("time", "dt", format!("{dt} must lie in (0, T]"))
            }
            _ => {}
        }
        if positive(t.horizon) && t.resolved_steps() > 1 << 16 {
            v.push("time", "M", format!("{} steps is more than 65536", t.resolved_steps()));
        }
        let p = &self.physics;
        if !p.lambda.is_finite() {
            v.push("physics", "lambda", "must be finite".into());
        }
        if !(p.r > 0.0 && p.r <= 1.0) {
            v.push("physics", "r", format!("{} is outside the range (0, 1]", p.r));
        }
        let d = &self.data;
        if !(d.amplitude.is_finite() && d.amplitude >= 0.0) {
            v.push("data", "amplitude", format!("{} must be finite and non-negative", d.amplitude));
        }
        if !positive(d.width) {
            v.push("data", "width", format!("{} must be positive and finite", d.width));
        }
        if !d.mode.is_finite() || (d.kind == DataKind::PlaneWave && d.mode.fract() != 0.0) {
            v.push("data", "mode", format!("{} must be finite (an integer for plane-wave)", d.mode));
        }
        let o = &self.options;
        if o.trials == 0 {
            v.push("options", "trials", "must be at least 1".into());
        }
        if o.times.is_empty() || !o.times.iter().all(|&t| positive(t)) {
            v.push("options", "times", "need at least one positive finite time".into());
        }
        if o.max_iter == 0 {
            v.push("options", "max_iter", "must be at least 1".into());
        }
        if !positive(o.tol) {
            v.push("options", "tol", format!("{} must be positive", o.tol));
        }
        if o.substeps == 0 {
            v.push("options", "substeps", "must be at least 1".into());
        }
        if o.levels < 3 {
            v.push("options", "levels", format!("{} must be at least 3", o.levels));
        }
        if !positive(o.perturbation) {
            v.push("options", "perturbation", format!("{} must be positive", o.perturbation));
        }
        if v.list.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid { issues: v.list })
        }
    }
}
