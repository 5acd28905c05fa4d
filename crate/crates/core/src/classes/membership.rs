use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{clamp_horizon, trend_word, CriterionReport, Verdict, WeightRole, WeightSequence};
use crate::counting::{blaschke_sum, coverage_distribution, BlaschkeReport, BlaschkeVerdict, CoverageTable};
use crate::error::{invalid, Error, Result};
use crate::geometry::{separation_constant, DiskPoint, StolzAperture};
use crate::series::fit_trend;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SequenceClass {
    /// `Σ m_a(n) w_n = ∞`.
    S,
    /// `liminf m_a(n)/v_n > 0`.
    L,
    /// `Σ_k (1 - |a_k|) w(⌊log₂ 1/(1 - |a_k|)⌋) = ∞`.
    P,
}

impl SequenceClass {
    fn role(self) -> WeightRole {
        match self {
            SequenceClass::L => WeightRole::V,
            _ => WeightRole::W,
        }
    }
}

impl fmt::Display for SequenceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SequenceClass::S => "S_w",
            SequenceClass::L => "L_v",
            SequenceClass::P => "P_w",
        })
    }
}

impl FromStr for SequenceClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S" | "S_w" | "s" => Ok(SequenceClass::S),
            "L" | "L_v" | "l" => Ok(SequenceClass::L),
            "P" | "P_w" | "p" => Ok(SequenceClass::P),
            other => Err(invalid(format!("unknown class `{other}` (expected S_w, L_v or P_w)"))),
        }
    }
}

/// A certified membership decision with its reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certified {
    pub member: bool,
    pub reason: String,
}

/// What a class test needs to know about a sequence, finite or symbolic.
pub trait ClassEvidence {
    fn separated(&self) -> bool;
    /// `m_a(0), …, m_a(horizon)` (exact values or certified lower bounds).
    fn coverage(&self, horizon: usize) -> Vec<f64>;
    /// `Σ (1 - |a_k|)` over each dyadic shell `0, …, horizon`.
    fn level_mass(&self, horizon: usize) -> Vec<f64>;
    /// Deepest index carrying information, for finite data.
    fn data_horizon(&self) -> Option<usize>;
    /// A decision that holds for the whole (possibly infinite) sequence.
    fn certify(&self, class: SequenceClass, weight: &WeightSequence) -> Option<Certified>;
}

/// A finite list of points together with its counting data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteSequence {
    pub coverage: CoverageTable,
    pub blaschke: BlaschkeReport,
    /// `None` for fewer than two points.
    pub separation: Option<f64>,
}

impl FiniteSequence {
    pub fn new(points: &[DiskPoint], alpha: StolzAperture) -> Self {
        FiniteSequence {
            coverage: coverage_distribution(points, alpha),
            blaschke: blaschke_sum(points),
            separation: separation_constant(points).ok().map(|s| s.delta),
        }
    }
}

impl ClassEvidence for FiniteSequence {
    fn separated(&self) -> bool {
        self.separation.is_none_or(|d| d > 0.0)
    }

    fn coverage(&self, horizon: usize) -> Vec<f64> {
        (0..=horizon).map(|n| self.coverage.m(n)).collect()
    }

    fn level_mass(&self, horizon: usize) -> Vec<f64> {
        (0..=horizon)
            .map(|n| self.blaschke.per_level.get(n).copied().unwrap_or(0.0))
            .collect()
    }

    fn data_horizon(&self) -> Option<usize> {
        Some(
            self.coverage
                .max_coverage()
                .max(self.blaschke.per_level.len().saturating_sub(1)),
        )
    }

    fn certify(&self, _class: SequenceClass, _weight: &WeightSequence) -> Option<Certified> {
        // classes of non-Blaschke sequences never contain a Blaschke sequence
        match self.blaschke.verdict {
            BlaschkeVerdict::ConvergentWithBound { bound } => Some(Certified {
                member: false,
                reason: format!("Blaschke sequence (per-shell masses decay geometrically, Σ(1-|a_k|) <= {bound})"),
            }),
            BlaschkeVerdict::DivergentAtHorizon { .. } => None,
        }
    }
}

/// Tests membership of a sequence in `S_w`, `L_v` or `P_w`.
///
/// `S_w` and `P_w` report the partial sums of their defining series; `L_v`
/// reports `m_a(n)/v_n` with the minimum over the later half as liminf
/// evidence. The verdict is certified only when the evidence says so.
pub fn class_membership<E: ClassEvidence + ?Sized>(
    a: &E,
    weight: &WeightSequence,
    class: SequenceClass,
    horizon: usize,
) -> Result<CriterionReport> {
    if !a.separated() {
        return Err(invalid("the classes are defined for separated sequences only"));
    }
    if weight.role != class.role() {
        return Err(invalid(format!("{class} needs a {:?}-type weight", class.role())));
    }
    let mut notes = Vec::new();
    let horizon = clamp_horizon(horizon, &[a.data_horizon(), weight.max_index()], &mut notes);
    let w = weight.values(horizon)?;
    let mut r = CriterionReport::new(&format!("membership in {class}"), horizon);
    r.notes = notes;
    let terms: Vec<f64> = match class {
        SequenceClass::S => a.coverage(horizon).iter().zip(&w).map(|(m, w)| m * w).collect(),
        SequenceClass::P => a.level_mass(horizon).iter().zip(&w).map(|(m, w)| m * w).collect(),
        SequenceClass::L => a
            .coverage(horizon)
            .iter()
            .zip(&w)
            .map(|(m, v)| if *v > 0.0 { m / v } else { f64::INFINITY })
            .collect(),
    };
    match class {
        SequenceClass::S | SequenceClass::P => {
            let mut acc = 0.0;
            for (n, t) in terms.iter().enumerate() {
                acc += t;
                r.series.push((n, acc));
            }
            r.partial_sum = Some(acc);
            let trend = fit_trend(&terms);
            r.notes.push(format!("terms look {}", trend_word(trend.kind)));
            r.trend = Some(trend);
        }
        SequenceClass::L => {
            r.series = terms.iter().copied().enumerate().skip(1).collect();
            let later = &terms[(horizon / 2).max(1).min(terms.len())..];
            let liminf = later.iter().copied().fold(f64::INFINITY, f64::min);
            r.extremum = Some(if liminf.is_finite() { liminf } else { 0.0 });
            r.notes.push(format!(
                "min of m_a(n)/v_n over n in [{}, {horizon}] is {}",
                (horizon / 2).max(1),
                r.extremum.unwrap()
            ));
        }
    }
    if let Some(c) = a.certify(class, weight) {
        r.verdict = if c.member { Verdict::Holds } else { Verdict::Fails };
        r.certificate = Some(c.reason);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::TAU;

    use super::*;
    use crate::series::TrendKind;

    fn alpha() -> StolzAperture {
        StolzAperture::default()
    }

    #[test]
    fn blaschke_input_is_not_in_s1() {
        let pts: Vec<DiskPoint> = (1..=20).map(|n| DiskPoint::new(1.0 - 2f64.powi(-n), 1.0).unwrap()).collect();
        let f = FiniteSequence::new(&pts, alpha());
        let w = WeightSequence::constant(1.0, WeightRole::W).unwrap();
        let r = class_membership(&f, &w, SequenceClass::S, 30).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert!(r.certificate.unwrap().contains("Blaschke"));
    }

    #[test]
    fn rejects_wrong_role_and_duplicates() {
        let p = DiskPoint::new(0.5, 0.0).unwrap();
        let f = FiniteSequence::new(&[p, p], alpha());
        let w = WeightSequence::constant(1.0, WeightRole::W).unwrap();
        assert!(class_membership(&f, &w, SequenceClass::S, 10).is_err());
        let g = FiniteSequence::new(&[p], alpha());
        assert!(class_membership(&g, &w, SequenceClass::L, 10).is_err());
    }

    #[test]
    fn full_rings_finite_truncation() {
        let mut pts = Vec::new();
        for n in 1..=8u32 {
            let m = 1u64 << n;
            for j in 0..m {
                pts.push(DiskPoint::new(1.0 - 2f64.powi(-(n as i32)), TAU * j as f64 / m as f64).unwrap());
            }
        }
        let f = FiniteSequence::new(&pts, alpha());
        let w = WeightSequence::constant(1.0, WeightRole::W).unwrap();
        let r = class_membership(&f, &w, SequenceClass::P, 8).unwrap();
        assert_eq!(r.verdict, Verdict::UndeterminedAtHorizon);
        assert!((r.partial_sum.unwrap() - 8.0).abs() < 1e-12);
        assert_eq!(r.trend.unwrap().kind, TrendKind::Divergent);
        let v = WeightSequence::constant(1.0, WeightRole::V).unwrap();
        let r = class_membership(&f, &v, SequenceClass::L, 8).unwrap();
        assert!(r.extremum.unwrap() > 0.0);
    }
}
