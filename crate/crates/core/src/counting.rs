//! The nontangential counting function `φ_a(e^{iθ}) = #(a ∩ Γ_α(e^{iθ}))`,
//! its distribution `m_a(n) = |{φ_a >= n}|`, Blaschke sums, and the
//! distribution of the nontangential maximal function of a discrete function.
//!
//! Everything is computed exactly from the arcs `I_{a_k}`: the sets `{φ_a >= n}`
//! and `{p* > λ}` are finite unions of arcs, so one sort of the `2K` arc
//! endpoints followed by a sweep gives every measure at once.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{neighbor_cover_width, separation_constant, stolz_arc, ArcKind, CircleArc, DiskPoint, SeparationReport, StolzAperture};

/// Active arcs over one elementary segment of the sweep.
pub(crate) struct Active<'a> {
    pub depth: usize,
    /// Multiset of tags of the arcs covering the segment.
    pub tags: &'a BTreeMap<u32, usize>,
}

/// Sweeps the circle once, calling `visit(length, active)` for each maximal
/// segment on which the set of covering arcs is constant.
pub(crate) fn sweep<F>(arcs: &[(CircleArc, u32)], mut visit: F)
where
    F: FnMut(f64, &Active<'_>),
{
    let mut active: BTreeMap<u32, usize> = BTreeMap::new();
    let mut depth = 0usize;
    // (angle, +1 | -1, tag)
    let mut events: Vec<(f64, i8, u32)> = Vec::with_capacity(4 * arcs.len());
    for &(arc, tag) in arcs {
        match arc.kind {
            ArcKind::Empty => {}
            ArcKind::FullCircle => {
                *active.entry(tag).or_default() += 1;
                depth += 1;
            }
            ArcKind::Proper => {
                let start = arc.start();
                let end = start + arc.length();
                if end <= TAU {
                    events.push((start, 1, tag));
                    events.push((end, -1, tag));
                } else {
                    events.push((start, 1, tag));
                    events.push((TAU, -1, tag));
                    events.push((0.0, 1, tag));
                    events.push((end - TAU, -1, tag));
                }
            }
        }
    }
    // additions before removals at equal angles keeps the multiset valid
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
    let mut prev = 0.0;
    let mut i = 0;
    while i < events.len() {
        let x = events[i].0;
        if x > prev {
            visit(x - prev, &Active { depth, tags: &active });
            prev = x;
        }
        while i < events.len() && events[i].0 == x {
            let (_, delta, tag) = events[i];
            if delta > 0 {
                *active.entry(tag).or_default() += 1;
                depth += 1;
            } else {
                let slot = active.get_mut(&tag).expect("removal of an inactive arc");
                *slot -= 1;
                if *slot == 0 {
                    active.remove(&tag);
                }
                depth -= 1;
            }
            i += 1;
        }
    }
    if prev < TAU {
        visit(TAU - prev, &Active { depth, tags: &active });
    }
}

pub(crate) fn arcs_of(a: &[DiskPoint], alpha: StolzAperture) -> Vec<CircleArc> {
    a.iter().map(|z| stolz_arc(z, alpha)).collect()
}

/// `φ_a(e^{iθ})`: how many points of `a` see `θ` in their Stolz arc.
pub fn phi_at(a: &[DiskPoint], theta: f64, alpha: StolzAperture) -> usize {
    a.iter().filter(|z| stolz_arc(z, alpha).contains(theta)).count()
}

/// The distribution `n ↦ m_a(n)` for `n >= 1`, with the convention `m_a(0) = 2π`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageTable {
    pub alpha: f64,
    /// `values[i] = m_a(i + 1)`; the last entry is at `n = max_coverage`.
    values: Vec<f64>,
}

impl CoverageTable {
    pub fn from_depth_histogram(alpha: f64, hist: &[f64]) -> Self {
        let mut values = vec![0.0; hist.len().saturating_sub(1)];
        let mut acc = 0.0;
        for d in (1..hist.len()).rev() {
            acc += hist[d];
            values[d - 1] = acc;
        }
        while values.last() == Some(&0.0) {
            values.pop();
        }
        CoverageTable { alpha, values }
    }

    /// `m_a(n)`.
    pub fn m(&self, n: usize) -> f64 {
        match n {
            0 => TAU,
            n => self.values.get(n - 1).copied().unwrap_or(0.0),
        }
    }

    /// Largest `n` with `m_a(n) > 0`.
    pub fn max_coverage(&self) -> usize {
        self.values.len()
    }

    /// `(n, m_a(n))` for `1 <= n <= max_coverage`.
    pub fn entries(&self) -> Vec<(usize, f64)> {
        self.values.iter().enumerate().map(|(i, &m)| (i + 1, m)).collect()
    }

    /// `Σ_{n >= 1} m_a(n)`, which equals `∫ φ_a`.
    pub fn layer_sum(&self) -> f64 {
        self.values.iter().rev().sum()
    }

    /// Limit diagnostic for `|NT(a)|`: the infimum of the tabulated values.
    pub fn nt_measure_estimate(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

fn depth_histogram(arcs: &[CircleArc]) -> Vec<f64> {
    let tagged: Vec<(CircleArc, u32)> = arcs.iter().map(|&a| (a, 0)).collect();
    let mut hist: Vec<f64> = Vec::new();
    sweep(&tagged, |len, act| {
        if hist.len() <= act.depth {
            hist.resize(act.depth + 1, 0.0);
        }
        hist[act.depth] += len;
    });
    hist
}

/// Exact `m_a(n)` for all `n` by an endpoint sweep over the arcs `I_{a_k}`.
pub fn coverage_distribution(a: &[DiskPoint], alpha: StolzAperture) -> CoverageTable {
    coverage_of_arcs(&arcs_of(a, alpha), alpha)
}

pub fn coverage_of_arcs(arcs: &[CircleArc], alpha: StolzAperture) -> CoverageTable {
    CoverageTable::from_depth_histogram(alpha.value(), &depth_histogram(arcs))
}

/// Essential range of `φ_a`: the smallest and largest depth held on a set of
/// positive measure.
pub fn phi_range(a: &[DiskPoint], alpha: StolzAperture) -> (usize, usize) {
    let hist = depth_histogram(&arcs_of(a, alpha));
    let lo = hist.iter().position(|&l| l > 0.0).unwrap_or(0);
    let hi = hist.iter().rposition(|&l| l > 0.0).unwrap_or(0);
    (lo, hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnionBoundReport {
    pub holds: bool,
    pub levels_checked: usize,
    /// `(n, m_{a∪b}(n), m_a(⌊n/2⌋) + m_b(⌊n/2⌋))` at the first failure.
    pub first_violation: Option<(usize, f64, f64)>,
}

/// Checks `m_{a∪b}(n) <= m_a(⌊n/2⌋) + m_b(⌊n/2⌋)` for every tabulated `n >= 1`.
pub fn union_distribution_bound(a: &CoverageTable, b: &CoverageTable, ab: &CoverageTable) -> Result<UnionBoundReport> {
    for t in [b, ab] {
        if t.alpha != a.alpha {
            return Err(Error::ApertureMismatch(a.alpha, t.alpha));
        }
    }
    let slack = 1e-9;
    let mut first_violation = None;
    for n in 1..=ab.max_coverage() {
        let lhs = ab.m(n);
        let rhs = a.m(n / 2) + b.m(n / 2);
        if lhs > rhs + slack && first_violation.is_none() {
            first_violation = Some((n, lhs, rhs));
        }
    }
    Ok(UnionBoundReport {
        holds: first_violation.is_none(),
        levels_checked: ab.max_coverage(),
        first_violation,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum BlaschkeVerdict {
    ConvergentWithBound { bound: f64 },
    DivergentAtHorizon { horizon: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeReport {
    pub partial_sum: f64,
    /// `Σ (1 - |a_k|)` over the points of each dyadic shell.
    pub per_level: Vec<f64>,
    pub verdict: BlaschkeVerdict,
}

/// Largest consecutive ratio of per-shell masses accepted as geometric decay.
const GEOMETRIC_RATIO: f64 = 0.9;

/// `Σ (1 - |a_k|)` with a convergence diagnostic read from the per-shell masses:
/// geometric decay over the deeper half of the shells gives a tail bound,
/// anything slower is reported as divergent at the deepest shell.
pub fn blaschke_sum(a: &[DiskPoint]) -> BlaschkeReport {
    let mut per_level: Vec<f64> = Vec::new();
    for z in a {
        let n = z.level() as usize;
        if per_level.len() <= n {
            per_level.resize(n + 1, 0.0);
        }
        per_level[n] += z.boundary_distance();
    }
    let partial_sum: f64 = per_level.iter().sum();
    let verdict = match geometric_tail(&per_level) {
        Some(bound) => BlaschkeVerdict::ConvergentWithBound {
            bound: partial_sum + bound,
        },
        None => BlaschkeVerdict::DivergentAtHorizon {
            horizon: per_level.len().saturating_sub(1),
        },
    };
    BlaschkeReport {
        partial_sum,
        per_level,
        verdict,
    }
}

/// Tail bound `s_L q / (1 - q)` when the last half of `s` decays with ratio `q <= 0.9`.
pub(crate) fn geometric_tail(s: &[f64]) -> Option<f64> {
    if s.len() < 3 {
        return Some(0.0);
    }
    let window = &s[s.len() / 2..];
    let mut q: f64 = 0.0;
    for w in window.windows(2) {
        if w[1] == 0.0 {
            continue;
        }
        if w[0] == 0.0 {
            return None;
        }
        q = q.max(w[1] / w[0]);
    }
    if window.len() < 2 || q > GEOMETRIC_RATIO {
        return None;
    }
    let last = *s.last().unwrap();
    Some(last * q / (1.0 - q))
}

/// Distribution of the nontangential maximal function `p*` of the discrete
/// function equal to `values[k]` at `a_k` and `0` elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalDistribution {
    /// Distinct positive values, ascending.
    pub values: Vec<f64>,
    /// `at_least[i] = |{p* >= values[i]}|`.
    pub at_least: Vec<f64>,
}

impl MaximalDistribution {
    /// `|{p* > λ}|`.
    pub fn measure_above(&self, lambda: f64) -> f64 {
        let i = self.values.partition_point(|&v| v <= lambda);
        self.at_least.get(i).copied().unwrap_or(0.0)
    }

    /// `|{p* >= λ}|`.
    pub fn measure_at_least(&self, lambda: f64) -> f64 {
        let i = self.values.partition_point(|&v| v < lambda);
        self.at_least.get(i).copied().unwrap_or(0.0)
    }

    /// `sup_λ λ |{p* > λ}|`, approached from below each jump of `p*`.
    pub fn weak_l1_constant(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.at_least)
            .map(|(v, m)| v * m)
            .fold(0.0, f64::max)
    }
}

fn check_values(a: &[DiskPoint], values: &[f64]) -> Result<()> {
    if a.len() != values.len() {
        return Err(invalid(format!("{} points but {} values", a.len(), values.len())));
    }
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(invalid(format!("values must be finite and nonnegative, got {v}")));
    }
    Ok(())
}

/// Sorted distinct values and each point's rank among them.
fn rank_values(values: &[f64]) -> (Vec<f64>, Vec<u32>) {
    let mut distinct: Vec<f64> = values.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let ranks = values
        .iter()
        .map(|v| distinct.partition_point(|d| d < v) as u32)
        .collect();
    (distinct, ranks)
}

/// Exact distribution of `p*`: `{p* > λ}` is the union of the arcs `I_{a_k}`
/// with `values[k] > λ`.
pub fn maximal_distribution(a: &[DiskPoint], values: &[f64], alpha: StolzAperture) -> Result<MaximalDistribution> {
    check_values(a, values)?;
    let (distinct, ranks) = rank_values(values);
    let tagged: Vec<(CircleArc, u32)> = a.iter().zip(&ranks).map(|(z, &r)| (stolz_arc(z, alpha), r)).collect();
    let mut by_rank = vec![0.0; distinct.len()];
    sweep(&tagged, |len, act| {
        if let Some((&top, _)) = act.tags.last_key_value() {
            by_rank[top as usize] += len;
        }
    });
    let mut at_least = vec![0.0; distinct.len()];
    let mut acc = 0.0;
    for i in (0..distinct.len()).rev() {
        acc += by_rank[i];
        at_least[i] = acc;
    }
    // p* = 0 where only zero values are seen; those are not level sets of interest
    let keep = distinct.partition_point(|&v| v <= 0.0);
    Ok(MaximalDistribution {
        values: distinct[keep..].to_vec(),
        at_least: at_least[keep..].to_vec(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclusionReport {
    pub holds: bool,
    /// Segments (maximal arcs of constant covering set) that were checked.
    pub segments: usize,
    pub violations: usize,
    /// `(φ_a, p*, required)` on the first violating segment.
    pub first_violation: Option<(usize, f64, f64)>,
}

/// Checks `{φ_a >= n} ⊂ {p* >= threshold(⌊n / m⌋)}` for every `n >= 1`.
pub fn maximal_inclusion<F>(a: &[DiskPoint], values: &[f64], alpha: StolzAperture, m: usize, threshold: F) -> Result<InclusionReport>
where
    F: Fn(usize) -> f64,
{
    check_values(a, values)?;
    if m == 0 {
        return Err(invalid("inclusion constant M must be at least 1"));
    }
    let (distinct, ranks) = rank_values(values);
    let tagged: Vec<(CircleArc, u32)> = a.iter().zip(&ranks).map(|(z, &r)| (stolz_arc(z, alpha), r)).collect();
    // needed[d] = max_{1 <= n <= d} threshold(⌊n / m⌋)
    let mut needed: Vec<f64> = vec![f64::NEG_INFINITY];
    let mut report = InclusionReport {
        holds: true,
        segments: 0,
        violations: 0,
        first_violation: None,
    };
    sweep(&tagged, |_, act| {
        if act.depth == 0 {
            return;
        }
        while needed.len() <= act.depth {
            let n = needed.len();
            let prev = *needed.last().unwrap();
            needed.push(prev.max(threshold(n / m)));
        }
        report.segments += 1;
        let top = act.tags.last_key_value().map(|(&r, _)| distinct[r as usize]).unwrap_or(0.0);
        if top < needed[act.depth] {
            report.holds = false;
            report.violations += 1;
            if report.first_violation.is_none() {
                report.first_violation = Some((act.depth, top, needed[act.depth]));
            }
        }
    });
    Ok(report)
}

/// Inclusion and domination for a separated sequence carrying values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    /// Points per dyadic cube, `N`.
    pub per_cube: usize,
    /// Neighbouring cubes needed to cover a Stolz angle, `M₁`.
    pub neighbor_width: u64,
    /// `M = N (2 M₁ + 1)`.
    pub m: usize,
    pub inclusion: InclusionReport,
    /// `sup_λ λ |{p* > λ}|`.
    pub weak_constant: f64,
    pub levels: usize,
    /// `(n, m_a(n), C / threshold(⌊n/M⌋))` where the bound fails.
    pub violations: Vec<(usize, f64, f64)>,
}

impl DominationReport {
    pub fn holds(&self) -> bool {
        self.inclusion.holds && self.violations.is_empty()
    }
}

/// Checks `{φ_a >= n} ⊂ {p* >= threshold(⌊n/M⌋)}` and the resulting
/// `m_a(n) <= C / threshold(⌊n/M⌋)` with `C` the measured weak-type constant
/// of `p*`.
pub fn domination_check<F>(a: &[DiskPoint], values: &[f64], alpha: StolzAperture, threshold: F) -> Result<DominationReport>
where
    F: Fn(usize) -> f64,
{
    let sep = separation_constant(a)?;
    if !sep.separated {
        return Err(Error::NotSeparated { delta: sep.delta });
    }
    let neighbor_width = neighbor_cover_width(alpha);
    let m = sep.max_per_cube * (2 * neighbor_width as usize + 1);
    let inclusion = maximal_inclusion(a, values, alpha, m, &threshold)?;
    let weak_constant = maximal_distribution(a, values, alpha)?.weak_l1_constant();
    let cov = coverage_distribution(a, alpha);
    let mut violations = Vec::new();
    for n in 1..=cov.max_coverage() {
        let t = threshold(n / m);
        if t <= 0.0 {
            continue;
        }
        let bound = weak_constant / t;
        if cov.m(n) > bound * (1.0 + 1e-12) {
            violations.push((n, cov.m(n), bound));
        }
    }
    Ok(DominationReport {
        per_cube: sep.max_per_cube,
        neighbor_width,
        m,
        inclusion,
        weak_constant,
        levels: cov.max_coverage(),
        violations,
    })
}

/// `W(θ) = Σ_k χ_{I_{a_k}}(θ) w(level_k)` summarised over the circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct WeightedCoverage {
    /// `∫ W`, computed segment by segment.
    pub integral: f64,
    /// `max_θ W(θ) / bound(φ_a(θ))` over segments with `φ_a >= 1`.
    pub max_ratio: f64,
    /// Most points of a single dyadic shell seen from one boundary point.
    pub max_per_level: usize,
}

/// Sweeps `W = Σ χ_k · level_weight(level_k)` and compares it with
/// `bound(φ_a(θ))` on every segment.
pub(crate) fn weighted_coverage<W, B>(a: &[DiskPoint], alpha: StolzAperture, level_weight: W, bound: B) -> WeightedCoverage
where
    W: Fn(u32) -> f64,
    B: Fn(usize) -> f64,
{
    let tagged: Vec<(CircleArc, u32)> = a.iter().map(|z| (stolz_arc(z, alpha), z.level())).collect();
    let mut out = WeightedCoverage {
        integral: 0.0,
        max_ratio: 0.0,
        max_per_level: 0,
    };
    sweep(&tagged, |len, act| {
        if act.depth == 0 {
            return;
        }
        let mut w = 0.0;
        for (&lvl, &c) in act.tags {
            w += c as f64 * level_weight(lvl);
            out.max_per_level = out.max_per_level.max(c);
        }
        out.integral += w * len;
        let b = bound(act.depth);
        if b > 0.0 {
            out.max_ratio = out.max_ratio.max(w / b);
        } else if w > 0.0 {
            out.max_ratio = f64::INFINITY;
        }
    });
    out
}

/// `W(θ)` at a single angle, by direct arc stabbing.
pub fn weighted_phi_at<W: Fn(u32) -> f64>(a: &[DiskPoint], theta: f64, alpha: StolzAperture, level_weight: W) -> f64 {
    a.iter()
        .filter(|z| stolz_arc(z, alpha).contains(theta))
        .map(|z| level_weight(z.level()))
        .sum()
}

/// Summary diagnostics of a finite sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceProfile {
    pub blaschke: BlaschkeReport,
    /// Absent for sequences with fewer than two points.
    pub separation: Option<SeparationReport>,
    pub coverage: CoverageTable,
    pub nt_measure_estimate: f64,
}

pub fn profile(a: &[DiskPoint], alpha: StolzAperture) -> SequenceProfile {
    let coverage = coverage_distribution(a, alpha);
    SequenceProfile {
        blaschke: blaschke_sum(a),
        separation: separation_constant(a).ok(),
        nt_measure_estimate: coverage.nt_measure_estimate(),
        coverage,
    }
}
