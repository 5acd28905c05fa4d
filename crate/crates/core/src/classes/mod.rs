//! Weight sequences, decay bounds and the criteria deciding whether a decay
//! bound is an essential minorant for the classes `S_w`, `L_v` and `P_w`.
//!
//! Infinite series are only ever decided through a certified asymptotic
//! family (ratio, p-series or Bertrand test). Everything else is reported as
//! undetermined at the horizon, together with a growth-rate fit.

mod criteria;
mod decrease;
mod membership;
mod summatory;
mod weights;

use serde::{Deserialize, Serialize};

use crate::series::{fit_trend, Asymptotic, Trend, TrendKind};

pub use criteria::{
    criterion_limsup, criterion_sum, criterion_theorem_b, limsup_corollary, lstable_check, relation_check,
    search_limsup_violation, LimsupWitness,
};
pub use decrease::DecreaseFunction;
pub use membership::{class_membership, Certified, ClassEvidence, FiniteSequence, SequenceClass};
pub use summatory::{criterion_summatory_integral, wa_at, wa_function, WaReport};
pub use weights::{WeightKind, WeightRole, WeightSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    UndeterminedAtHorizon,
}

/// Outcome of a criterion evaluated up to a finite horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub criterion: String,
    pub verdict: Verdict,
    pub horizon: usize,
    pub partial_sum: Option<f64>,
    /// Supremum or infimum evidence for limsup/liminf style criteria.
    pub extremum: Option<f64>,
    pub certificate: Option<String>,
    pub tail_estimate: Option<f64>,
    pub trend: Option<Trend>,
    /// Plot-ready `(n, value)` series: partial sums, products or ratios.
    pub series: Vec<(usize, f64)>,
    pub witness: Option<LimsupWitness>,
    pub notes: Vec<String>,
}

impl CriterionReport {
    pub(crate) fn new(criterion: &str, horizon: usize) -> Self {
        CriterionReport {
            criterion: criterion.to_string(),
            verdict: Verdict::UndeterminedAtHorizon,
            horizon,
            partial_sum: None,
            extremum: None,
            certificate: None,
            tail_estimate: None,
            trend: None,
            series: Vec::new(),
            witness: None,
            notes: Vec::new(),
        }
    }
}

/// Which outcome of a series test counts as the criterion holding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum HoldsWhen {
    Converges,
    Diverges,
}

/// Sums `terms`, attaches the certificate of `asym` when known, and otherwise
/// the trend of the terms.
pub(crate) fn series_report(
    criterion: &str,
    horizon: usize,
    terms: &[(usize, f64)],
    asym: Option<Asymptotic>,
    holds_when: HoldsWhen,
) -> CriterionReport {
    let mut r = CriterionReport::new(criterion, horizon);
    let mut acc = 0.0;
    for &(n, t) in terms {
        acc += t;
        r.series.push((n, acc));
    }
    r.partial_sum = Some(acc);
    let values: Vec<f64> = terms.iter().map(|&(_, t)| t).collect();
    r.trend = Some(fit_trend(&values));
    match asym {
        Some(a) => {
            let converges = a.series_converges();
            r.verdict = match (converges, holds_when) {
                (true, HoldsWhen::Converges) | (false, HoldsWhen::Diverges) => Verdict::Holds,
                _ => Verdict::Fails,
            };
            r.certificate = Some(a.certificate());
            r.tail_estimate = a.tail_estimate(horizon);
        }
        None => {
            let kind = r.trend.as_ref().map(|t| t.kind).unwrap_or(TrendKind::Unclear);
            r.notes.push(format!("no parametric tail; terms look {}", trend_word(kind)));
        }
    }
    r
}

pub(crate) fn trend_word(kind: TrendKind) -> &'static str {
    match kind {
        TrendKind::Convergent => "summable",
        TrendKind::Divergent => "non-summable",
        TrendKind::Unclear => "inconclusive",
    }
}

/// Caps `horizon` at the last index a table can answer for.
pub(crate) fn clamp_horizon(horizon: usize, limits: &[Option<usize>], notes: &mut Vec<String>) -> usize {
    let cap = limits.iter().flatten().copied().min();
    match cap {
        Some(c) if c < horizon => {
            notes.push(format!("horizon reduced from {horizon} to {c} (table length)"));
            c
        }
        _ => horizon,
    }
}
