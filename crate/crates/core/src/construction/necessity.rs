use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::lemma61::{dyadic_point, from_selection, Lemma61};
use super::levels::{selection_from_values, MAX_DEPTH};
use crate::classes::{criterion_limsup, DecreaseFunction, Verdict, WeightRole, WeightSequence};
use crate::counting::{coverage_distribution, CoverageTable};
use crate::error::{invalid, Error, Result};
use crate::geometry::{delta0, hyperbolic_circle, min_pairwise_distance, DiskPoint, StolzAperture, DELTA0_LEVELS};

/// Companions per point when thickening.
pub const DEFAULT_THICKENING: usize = 4;

/// One point of a thickened sequence with the level of the point it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThickPoint {
    pub point: DiskPoint,
    pub parent_level: u32,
    pub is_parent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Necessity {
    pub c: usize,
    pub e: Vec<usize>,
    /// `A = sup_{n ∉ E} g̃(⌊n/C⌋) v_n` over the horizon `C(N + 1) - 1`.
    pub a_sup: f64,
    /// `g̃₁(m) = A / v_{C(m+1)-1}`.
    pub g1: Vec<f64>,
    /// `E₁ = {⌊n/C⌋ : n ∈ E}`.
    pub e1: Vec<usize>,
    /// Construction run on `g₁`.
    pub base: Lemma61,
    /// `q̃`: the thickened points of `q = p ∖ a`.
    pub q_tilde: Vec<ThickPoint>,
    /// `ã ∪ b̃`.
    pub blaschke_part: Vec<ThickPoint>,
    pub thickening: usize,
    /// Gleason radius of the companion circles.
    pub radius: f64,
    pub notes: Vec<String>,
}

/// Verification data for a necessity construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NecessityChecks {
    /// `Σ (1 - |z|)` over `ã ∪ b̃`.
    pub blaschke_sum: f64,
    /// Bound `(M + 1) · 2 (Σ_{a} (1 - |z|) + 2)` certifying the sum above.
    pub blaschke_bound: f64,
    /// `(m, m_{p̃∪b̃}(m), v_m/A)` where the membership bound fails.
    pub membership_violations: Vec<(usize, f64, f64)>,
    pub membership_levels: usize,
    /// Largest `C'` with `m_{p̃∪b̃}(C' n) >= m_{p∪b}(n)` for `1 <= n <= N`.
    pub c_prime: usize,
    /// `q̃` levels where `g̃(m) > g̃₁(m)`.
    pub dominance_violations: Vec<usize>,
    /// Smallest Gleason distance inside the thickened sequence.
    pub thick_separation: f64,
    /// Largest Gleason distance from a companion to its parent.
    pub max_companion_distance: f64,
}

impl NecessityChecks {
    pub fn violations(&self) -> usize {
        self.membership_violations.len()
            + self.dominance_violations.len()
            + usize::from(self.blaschke_sum > self.blaschke_bound)
            + usize::from(self.thick_separation <= 0.0)
    }
}

fn thicken(points: &[(DiskPoint, u32)], radius: f64, m: usize) -> Result<Vec<ThickPoint>> {
    let mut out = Vec::with_capacity(points.len() * (m + 1));
    for &(z, lvl) in points {
        out.push(ThickPoint {
            point: z,
            parent_level: lvl,
            is_parent: true,
        });
        for c in hyperbolic_circle(&z, radius, m)? {
            out.push(ThickPoint {
                point: c,
                parent_level: lvl,
                is_parent: false,
            });
        }
    }
    Ok(out)
}

/// Builds the sequence showing `g` is not an essential minorant for `L_v`,
/// from a pair `(C, E)` with `sup_{n ∉ E} g̃(⌊n/C⌋) v_n = A < ∞`.
///
/// `g̃₁(m) = A / v_{C(m+1)-1}` feeds the Cantor-type construction; the points
/// on levels of `E₁` form `a`, the rest of `p` forms `q`, and every point is
/// joined by `thickening` companions on a small Gleason circle.
pub fn construct_necessity_thm2(
    v: &WeightSequence,
    g: &DecreaseFunction,
    c: usize,
    e: &BTreeSet<usize>,
    depth: usize,
    thickening: usize,
) -> Result<Necessity> {
    if v.role != WeightRole::V {
        return Err(invalid("the necessity construction takes a v-type weight"));
    }
    if c < 1 {
        return Err(invalid("C must be a positive integer"));
    }
    if depth > MAX_DEPTH {
        return Err(Error::TooLarge(format!("depth {depth} exceeds the cap {MAX_DEPTH}")));
    }
    let mut notes = Vec::new();
    let horizon = c * (depth + 1) - 1;
    let mut v0 = v.value(0)?;
    if v0 > 1.0 {
        notes.push(format!("v normalised by v_0 = {v0}"));
    } else {
        v0 = 1.0;
    }
    let instance = criterion_limsup(g, v, c, e, horizon)?;
    if instance.horizon < horizon {
        return Err(invalid(format!("tables too short for depth {depth} with C = {c}")));
    }
    match instance.verdict {
        Verdict::Holds => {
            return Err(Error::Refused {
                reason: format!("g̃(⌊n/{c}⌋) v_n is unbounded off E, so this (C, E) gives no finite A"),
                certificate: instance.certificate.unwrap_or_default(),
            })
        }
        Verdict::Fails => notes.push(format!("A is finite: {}", instance.certificate.clone().unwrap_or_default())),
        Verdict::UndeterminedAtHorizon => notes.push(format!("A finite at horizon {horizon} (not certified beyond)")),
    }
    let a_sup = instance.extremum.unwrap_or(0.0) / v0;
    if a_sup <= 0.0 {
        return Err(invalid("A = 0: g̃ vanishes off E"));
    }
    let mut g1 = Vec::with_capacity(depth + 1);
    for m in 0..=depth {
        let vm = v.value(c * (m + 1) - 1)? / v0;
        if vm <= 0.0 {
            return Err(invalid(format!("v vanishes at {}", c * (m + 1) - 1)));
        }
        g1.push(a_sup / vm);
    }
    let selection = selection_from_values(g1.clone())?;
    if selection.clamped {
        notes.push("g̃₁ < 1 at some levels: l clamped to 0 there".into());
    }
    let g1_fn = DecreaseFunction::table(g1.clone())?;
    let base = from_selection(g1_fn, selection, Vec::new());
    let e1: BTreeSet<usize> = e.iter().map(|&n| n / c).collect();
    let mut q = Vec::new();
    let mut ab = Vec::new();
    for &n in &base.split.p_levels {
        for &k in &base.selection.j[n] {
            let z = (dyadic_point(n, k), n as u32);
            if e1.contains(&n) {
                ab.push(z);
            } else {
                q.push(z);
            }
        }
    }
    for &n in &base.split.b_levels {
        for &k in &base.selection.j[n] {
            ab.push((dyadic_point(n, k), n as u32));
        }
    }
    let all: Vec<DiskPoint> = q.iter().chain(&ab).map(|&(z, _)| z).collect();
    let delta = if all.len() >= 2 { min_pairwise_distance(&all) } else { 1.0 };
    let radius = (delta0(DELTA0_LEVELS) / 2.0).min(delta / 4.0);
    Ok(Necessity {
        c,
        e: e.iter().copied().collect(),
        a_sup,
        g1,
        e1: e1.into_iter().collect(),
        q_tilde: thicken(&q, radius, thickening)?,
        blaschke_part: thicken(&ab, radius, thickening)?,
        thickening,
        radius,
        base,
        notes,
    })
}

impl Necessity {
    pub fn p_tilde_b_tilde(&self) -> Vec<DiskPoint> {
        self.q_tilde.iter().chain(&self.blaschke_part).map(|t| t.point).collect()
    }

    /// Points of `q̃` with the value `g̃` must be dominated by, read at each
    /// point's own radius.
    pub fn q_tilde_targets(&self, g: &DecreaseFunction) -> Result<Vec<(DiskPoint, f64)>> {
        self.q_tilde
            .iter()
            .map(|t| {
                let lambda = -(1.0 - t.point.rho()).log2();
                Ok((t.point, g.gtilde(lambda.max(0.0))?))
            })
            .collect()
    }

    pub fn check(&self, g: &DecreaseFunction, v: &WeightSequence, alpha: StolzAperture) -> Result<NecessityChecks> {
        let thick = self.p_tilde_b_tilde();
        let cov_thick = coverage_distribution(&thick, alpha);
        let cov_base = self.base.coverage(alpha);
        let depth = self.base.depth();
        let v0 = v.value(0)?.max(1.0);
        let mut membership_violations = Vec::new();
        for m in 1..=depth {
            let target = v.value(m)? / v0 / self.a_sup;
            if cov_thick.m(m) < target {
                membership_violations.push((m, cov_thick.m(m), target));
            }
        }
        let blaschke_sum = self.blaschke_part.iter().fold(0.0, |acc, t| acc + t.point.boundary_distance());
        let a_mass: f64 = self
            .blaschke_part
            .iter()
            .filter(|t| t.is_parent && self.e1.contains(&(t.parent_level as usize)))
            .map(|t| t.point.boundary_distance())
            .sum();
        // a companion at Gleason distance r has 1 - |z| at most (1 + r)/(1 - r) <= 2 times its parent's
        let blaschke_bound = (self.thickening + 1) as f64 * 2.0 * (a_mass + 2.0);
        let mut dominance_violations = Vec::new();
        for &n in &self.base.split.p_levels {
            if !self.e1.contains(&n) && g.gtilde(n as f64)? > self.g1[n] {
                dominance_violations.push(n);
            }
        }
        let thick_separation = if thick.len() >= 2 { min_pairwise_distance(&thick) } else { 1.0 };
        let max_companion_distance = self.companion_distance();
        Ok(NecessityChecks {
            blaschke_sum,
            blaschke_bound,
            membership_violations,
            membership_levels: depth,
            c_prime: c_prime(&cov_thick, &cov_base, depth),
            dominance_violations,
            thick_separation,
            max_companion_distance,
        })
    }

    fn companion_distance(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for group in [&self.q_tilde, &self.blaschke_part] {
            let mut parent = None;
            for t in group.iter() {
                if t.is_parent {
                    parent = Some(t.point);
                } else if let Some(p) = parent {
                    worst = worst.max(crate::geometry::gleason_distance(&p, &t.point));
                }
            }
        }
        worst
    }
}

/// Largest `C'` with `thick(C' n) >= base(n)` for every `1 <= n <= depth`.
pub fn c_prime(thick: &CoverageTable, base: &CoverageTable, depth: usize) -> usize {
    let mut best = 0;
    let mut cp = 1;
    loop {
        let ok = (1..=depth).all(|n| thick.m(cp * n) >= base.m(n) - 1e-9);
        if !ok {
            return best;
        }
        best = cp;
        cp += 1;
        if cp > depth * (thick.max_coverage() + 1) {
            return best;
        }
    }
}
