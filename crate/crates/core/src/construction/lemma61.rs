use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::levels::{build_level_selection, ghat, level_sequence, LevelSelection, SelectionChecks};
use super::measure::{build_measure, check_cylinder_masses, DyadicMeasure};
use crate::classes::{criterion_theorem_b, Certified, ClassEvidence, DecreaseFunction, SequenceClass, Verdict, WeightSequence};
use crate::counting::{coverage_distribution, CoverageTable};
use crate::error::{Error, Result};
use crate::geometry::{DiskPoint, DyadicIndex, StolzAperture, MIN_COVERING_APERTURE};

/// Split of the family `p⁰` into the part `p` kept for the harmonic lower
/// bound and the Blaschke remainder `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitResult {
    /// Levels `n` with `l_n >= log₂ ĝ(n) - 1`.
    pub p_levels: Vec<usize>,
    /// The levels `A = {n : l_n < log₂ ĝ(n) - 1}` carrying `b`.
    pub b_levels: Vec<usize>,
    pub empty_p: bool,
    /// `Σ_b (1 - |p_k|) = Σ_{n ∈ A} 2^{-l_n}`.
    pub b_blaschke_sum: f64,
    /// Pairs of levels in `A` sharing the same `l`.
    pub repeated_l: Vec<(usize, usize)>,
    /// Levels of `p` where `2^{l_n} <= ĝ(n) <= 2^{l_n + 1}` fails.
    pub bracket_violations: Vec<usize>,
}

pub fn split_p_b(sel: &LevelSelection) -> SplitResult {
    let mut p_levels = Vec::new();
    let mut b_levels = Vec::new();
    let mut bracket_violations = Vec::new();
    let mut by_l: BTreeMap<u32, usize> = BTreeMap::new();
    let mut repeated_l = Vec::new();
    let mut b_sum = 0.0;
    for n in 0..=sel.depth() {
        let l = sel.l[n];
        let gh = ghat(sel.gtilde[n]);
        if (l as f64) < gh.log2() - 1.0 {
            b_levels.push(n);
            b_sum += sel.j[n].len() as f64 * 2f64.powi(-(n as i32));
            if let Some(&m) = by_l.get(&l) {
                repeated_l.push((m, n));
            }
            by_l.insert(l, n);
        } else {
            let lo = 2f64.powi(l as i32);
            if !(lo <= gh && gh <= 2.0 * lo) {
                bracket_violations.push(n);
            }
            p_levels.push(n);
        }
    }
    SplitResult {
        empty_p: p_levels.is_empty(),
        p_levels,
        b_levels,
        b_blaschke_sum: b_sum,
        repeated_l,
        bracket_violations,
    }
}

/// The output of the Cantor-type construction at a fixed depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma61 {
    pub g: DecreaseFunction,
    pub selection: LevelSelection,
    pub measure: DyadicMeasure,
    pub split: SplitResult,
    pub notes: Vec<String>,
}

/// `p_{n,j} = (1 - 2^{-n}) e^{2πi 2^{-n}(j + 1/2)}`.
pub fn dyadic_point(n: usize, j: u64) -> DiskPoint {
    DyadicIndex { n: n as u32, k: j }.anchor_point()
}

/// Runs the construction for `g` up to `depth`.
///
/// Refuses when `Σ 1/g̃(n)` is certified convergent: then every candidate
/// `p` is eventually empty and the construction proves nothing.
pub fn construct_lemma61(g: &DecreaseFunction, depth: usize) -> Result<Lemma61> {
    let mut notes = Vec::new();
    let test = criterion_theorem_b(g, depth.max(64).min(g.max_index().unwrap_or(usize::MAX)))?;
    match test.verdict {
        Verdict::Holds => {
            return Err(Error::Refused {
                reason: "Σ 1/g̃(n) converges, so g is an essential minorant and the construction is vacuous".into(),
                certificate: test.certificate.unwrap_or_default(),
            })
        }
        Verdict::Fails => notes.push(format!("Σ 1/g̃(n) diverges: {}", test.certificate.unwrap_or_default())),
        Verdict::UndeterminedAtHorizon => notes.push("divergence of Σ 1/g̃(n) not certified; constructing at the requested depth".into()),
    }
    let selection = build_level_selection(g, depth)?;
    if selection.clamped {
        notes.push("g̃ < 1 at some levels: l_n clamped to 0 there".into());
    }
    Ok(from_selection(g.clone(), selection, notes))
}

pub(crate) fn from_selection(g: DecreaseFunction, selection: LevelSelection, mut notes: Vec<String>) -> Lemma61 {
    let measure = build_measure(&selection);
    let split = split_p_b(&selection);
    if split.empty_p {
        notes.push(format!("p is empty up to depth {}", selection.depth()));
    }
    Lemma61 {
        g,
        selection,
        measure,
        split,
        notes,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma61Checks {
    pub selection: SelectionChecks,
    pub mass_violations: usize,
    /// `(n, m_{p∪b}(n), 1/g̃(n))` wherever the coverage bound fails.
    pub coverage_violations: Vec<(usize, f64, f64)>,
    pub repeated_l: Vec<(usize, usize)>,
    /// `l` values whose grouped `b` mass exceeds `2^{-l}`.
    pub grouping_violations: Vec<u32>,
    pub b_blaschke_sum: f64,
    /// `Σ_k 2^{-k}`.
    pub b_blaschke_bound: f64,
}

impl Lemma61Checks {
    pub fn violations(&self) -> usize {
        self.selection.violations()
            + self.mass_violations
            + self.coverage_violations.len()
            + self.repeated_l.len()
            + self.grouping_violations.len()
    }
}

impl Lemma61 {
    pub fn depth(&self) -> usize {
        self.selection.depth()
    }

    fn points_of(&self, levels: &[usize]) -> Vec<DiskPoint> {
        levels
            .iter()
            .flat_map(|&n| self.selection.j[n].iter().map(move |&k| dyadic_point(n, k)))
            .collect()
    }

    pub fn p_points(&self) -> Vec<DiskPoint> {
        self.points_of(&self.split.p_levels)
    }

    pub fn b_points(&self) -> Vec<DiskPoint> {
        self.points_of(&self.split.b_levels)
    }

    /// `p⁰ = p ∪ b`, level by level.
    pub fn all_points(&self) -> Vec<DiskPoint> {
        self.points_of(&(0..=self.depth()).collect::<Vec<_>>())
    }

    /// `(point, g̃(level))` for every point of `p`.
    pub fn p_with_targets(&self) -> Vec<(DiskPoint, f64)> {
        self.split
            .p_levels
            .iter()
            .flat_map(|&n| {
                let t = self.selection.gtilde[n];
                self.selection.j[n].iter().map(move |&k| (dyadic_point(n, k), t))
            })
            .collect()
    }

    pub fn coverage(&self, alpha: StolzAperture) -> CoverageTable {
        coverage_distribution(&self.all_points(), alpha)
    }

    /// Every structural and quantitative property of the construction.
    pub fn check(&self, alpha: StolzAperture) -> Lemma61Checks {
        let cov = self.coverage(alpha);
        self.check_with_coverage(&cov)
    }

    pub fn check_with_coverage(&self, cov: &CoverageTable) -> Lemma61Checks {
        let mut coverage_violations = Vec::new();
        for n in 1..=self.depth() {
            let gt = self.selection.gtilde[n];
            let target = if gt > 0.0 { 1.0 / gt } else { f64::INFINITY };
            if cov.m(n) < target {
                coverage_violations.push((n, cov.m(n), target));
            }
        }
        let mut grouped: BTreeMap<u32, f64> = BTreeMap::new();
        for &n in &self.split.b_levels {
            *grouped.entry(self.selection.l[n]).or_default() += self.selection.j[n].len() as f64 * 2f64.powi(-(n as i32));
        }
        let grouping_violations = grouped
            .into_iter()
            .filter(|&(l, m)| m > 2f64.powi(-(l as i32)))
            .map(|(l, _)| l)
            .collect();
        Lemma61Checks {
            selection: self.selection.check(),
            mass_violations: check_cylinder_masses(&self.selection, &self.measure),
            coverage_violations,
            repeated_l: self.split.repeated_l.clone(),
            grouping_violations,
            b_blaschke_sum: self.split.b_blaschke_sum,
            b_blaschke_bound: 2.0,
        }
    }
}

/// Which part of the infinite construction a symbolic descriptor stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CantorPart {
    /// `p ∪ b`.
    All,
    P,
}

/// The infinite Cantor-type family of a decay bound, described by its levels
/// only. Shell `n` carries mass `2^{-l_n}` and, for apertures above
/// [`MIN_COVERING_APERTURE`], `m(n) >= 2π 2^{-l_n} >= 2π/ĝ(n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CantorFamily {
    pub g: DecreaseFunction,
    pub alpha: f64,
    pub part: CantorPart,
}

impl CantorFamily {
    fn levels(&self, horizon: usize) -> Vec<u32> {
        let gt: Vec<f64> = (0..=horizon).map(|n| self.g.gtilde(n as f64).unwrap_or(f64::INFINITY)).collect();
        level_sequence(&gt)
    }

    fn in_p(&self, n: usize, l: u32) -> bool {
        let gh = ghat(self.g.gtilde(n as f64).unwrap_or(f64::INFINITY));
        (l as f64) >= gh.log2() - 1.0
    }
}

impl ClassEvidence for CantorFamily {
    fn separated(&self) -> bool {
        true
    }

    fn coverage(&self, horizon: usize) -> Vec<f64> {
        if self.alpha < MIN_COVERING_APERTURE || self.part == CantorPart::P {
            // no cheap lower bound without enumerating the points
            let mut v = vec![0.0; horizon + 1];
            v[0] = TAU;
            return v;
        }
        self.levels(horizon)
            .iter()
            .enumerate()
            .map(|(n, &l)| if n == 0 { TAU } else { TAU * 2f64.powi(-(l as i32)) })
            .collect()
    }

    fn level_mass(&self, horizon: usize) -> Vec<f64> {
        self.levels(horizon)
            .iter()
            .enumerate()
            .map(|(n, &l)| {
                if self.part == CantorPart::All || self.in_p(n, l) {
                    2f64.powi(-(l as i32))
                } else {
                    0.0
                }
            })
            .collect()
    }

    fn data_horizon(&self) -> Option<usize> {
        self.g.max_index()
    }

    fn certify(&self, class: SequenceClass, weight: &WeightSequence) -> Option<Certified> {
        let ga = self.g.asymptotic()?;
        let wa = weight.asymptotic()?;
        let terms = wa / ga;
        let diverges = !terms.series_converges();
        match class {
            // shell masses are at least 1/ĝ(n) on all levels; b carries at most 2
            SequenceClass::P if diverges => Some(Certified {
                member: true,
                reason: format!("Σ_n w_n 2^(-l_n) >= Σ w_n/ĝ(n) - 2 sup w, and {}", terms.certificate()),
            }),
            // on p-levels 2^(-l_n) <= 2/ĝ(n), and b adds at most 2 sup w
            SequenceClass::P => Some(Certified {
                member: false,
                reason: format!("Σ_n w_n 2^(-l_n) <= 2 Σ w_n/ĝ(n) + 2 sup w, and {}", terms.certificate()),
            }),
            SequenceClass::S if diverges && self.alpha >= MIN_COVERING_APERTURE => Some(Certified {
                member: true,
                reason: format!("m(n) >= 2π/ĝ(n) and {}", terms.certificate()),
            }),
            SequenceClass::S if diverges && self.part == CantorPart::P => Some(Certified {
                member: true,
                reason: format!("P_w membership implies S_w membership, and {}", terms.certificate()),
            }),
            SequenceClass::L if self.alpha >= MIN_COVERING_APERTURE && self.part == CantorPart::All => {
                let ratio = (ga * wa).recip();
                (!ratio.tends_to_zero()).then(|| Certified {
                    member: true,
                    reason: "m(n)/v_n >= 2π/(ĝ(n) v_n), which stays bounded below".into(),
                })
            }
            _ => None,
        }
    }
}
