//! Desk-scale experiments: inequality ratios, persistence of regularity and
//! decay, constraint propagation, and stability of the approximation scheme.

use std::fmt::Write as _;

use serde::Serialize;

use crate::report::fmt_real;

pub mod data;
pub mod evolution;
pub mod inequalities;

pub use data::{gaussian, plane_wave, random_field, DataKind, DataSpec};
pub use evolution::{
    apriori_bound, approximation_sequence_experiment, constraint_propagation_experiment,
    constraint_propagation_from, constraint_refinement, curve_distance, data_size, level_cutoffs,
    lipschitz_data_experiment, persistence_experiment, picard_vs_stepper, system_bound_lhs,
    AgreementReport, ApproximationTable, AprioriReport, ConstraintRefinement, ConstraintReport,
    ConstraintStatus, LevelPair, LipschitzReport, PersistenceReport, CONSTRAINT_TOLERANCE,
    PERSISTENCE_GROWTH_LIMIT,
};
pub use inequalities::{
    check_inhomogeneous_strichartz, check_strichartz, check_weighted_semigroup, conjugate, free_family,
    inhomogeneous_ensemble, refinement_check, semigroup_envelope, strichartz_ensemble,
    weighted_semigroup_ensemble, EnsembleSpec, EnsembleSummary, RefinementCheck, StrichartzPair,
    REFINEMENT_TOLERANCE,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RhsTerm {
    pub name: String,
    pub value: f64,
}

impl RhsTerm {
    pub fn new(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
        }
    }
}

/// Where a ratio came from, for replay.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialMeta {
    pub n_points: usize,
    pub box_length: f64,
    pub data_id: String,
    pub seed: Option<u64>,
    pub steps: Option<usize>,
    /// Horizon `T` for space-time checks, evaluation time `t` otherwise.
    pub time: Option<f64>,
    pub pairs: Vec<StrichartzPair>,
}

/// Both sides of one instance of a "≲" estimate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityReport {
    pub name: String,
    pub lhs: f64,
    pub rhs_terms: Vec<RhsTerm>,
    /// `lhs / Σ rhs_terms`, defined as 0 when `lhs = 0`.
    pub ratio: f64,
    pub meta: TrialMeta,
}

impl InequalityReport {
    pub fn new(name: impl Into<String>, lhs: f64, rhs_terms: Vec<RhsTerm>, meta: TrialMeta) -> Self {
        let total: f64 = rhs_terms.iter().map(|t| t.value).sum();
        let ratio = if lhs == 0.0 { 0.0 } else { lhs / total };
        Self {
            name: name.into(),
            lhs,
            rhs_terms,
            ratio,
            meta,
        }
    }

    pub fn rhs_total(&self) -> f64 {
        self.rhs_terms.iter().map(|t| t.value).sum()
    }
}

/// One row per report:
/// `trial,data_id,n,L,M,time,pairs,lhs,rhs_total,ratio,<rhs terms...>`.
/// Every report must carry the same right-side terms.
pub fn inequality_csv(reports: &[InequalityReport]) -> String {
    let mut out = String::from("trial,data_id,n,L,M,time,pairs,lhs,rhs_total,ratio");
    if let Some(first) = reports.first() {
        for term in &first.rhs_terms {
            out.push(',');
            out.push_str(&term.name);
        }
    }
    out.push('\n');
    for (i, rep) in reports.iter().enumerate() {
        let m = &rep.meta;
        let pairs: Vec<String> = m.pairs.iter().map(|p| p.to_string()).collect();
        let _ = write!(
            out,
            "{i},{},{},{},{},{},\"{}\",{},{},{}",
            m.data_id,
            m.n_points,
            fmt_real(m.box_length),
            m.steps.map(|s| s.to_string()).unwrap_or_default(),
            m.time.map(fmt_real).unwrap_or_default(),
            pairs.join(";"),
            fmt_real(rep.lhs),
            fmt_real(rep.rhs_total()),
            fmt_real(rep.ratio),
        );
        for term in &rep.rhs_terms {
            out.push(',');
            out.push_str(&fmt_real(term.value));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> TrialMeta {
        TrialMeta {
            n_points: 64,
            box_length: 8.0,
            data_id: "x".into(),
            seed: Some(1),
            steps: Some(4),
            time: None,
            pairs: StrichartzPair::standard().to_vec(),
        }
    }

    #[test]
    fn ratio_conventions() {
        let zero = InequalityReport::new("z", 0.0, vec![RhsTerm::new("a", 0.0)], meta());
        assert_eq!(zero.ratio, 0.0);
        let rep = InequalityReport::new("r", 3.0, vec![RhsTerm::new("a", 1.0), RhsTerm::new("b", 2.0)], meta());
        assert_eq!(rep.ratio, 1.0);
        assert_eq!(rep.rhs_total(), 3.0);
    }

    #[test]
    fn csv_layout() {
        let rep = InequalityReport::new("r", 1.0, vec![RhsTerm::new("a", 2.0)], meta());
        let csv = inequality_csv(&[rep.clone(), rep]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "trial,data_id,n,L,M,time,pairs,lhs,rhs_total,ratio,a");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("0,x,64,"));
        assert!(lines[1].contains("\"(inf,4);(2,inf);(4,8)\""));
        assert!(lines[2].ends_with(&fmt_real(2.0)));
    }
}
