use serde::Serialize;

use super::{blaschke_log, poisson_integral, CircleMeasure, HarmonicWitness};
use crate::classes::DecreaseFunction;
use crate::construction::{Lemma61, Necessity};
use crate::error::{invalid, Result};
use crate::geometry::DiskPoint;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinorantViolation {
    pub index: usize,
    pub level: u32,
    pub value: f64,
    pub target: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelMargin {
    pub level: u32,
    pub points: usize,
    pub min_margin: f64,
    pub violations: usize,
}

/// Outcome of checking `h(a_k) >= target_k` point by point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinorantReport {
    pub scale: f64,
    pub checked: usize,
    pub violations: Vec<MinorantViolation>,
    /// Smallest `h(a_k) - target_k`; `+∞` for an empty input.
    pub min_margin: f64,
    pub median_margin: f64,
    pub by_level: Vec<LevelMargin>,
}

impl MinorantReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    /// Deepest level with a violation.
    pub fn deepest_violation(&self) -> Option<u32> {
        self.by_level.iter().rev().find(|l| l.violations > 0).map(|l| l.level)
    }
}

fn report(points: &[DiskPoint], h0: &[f64], targets: &[f64], scale: f64) -> MinorantReport {
    let mut violations = Vec::new();
    let mut margins = Vec::with_capacity(points.len());
    let mut by_level: Vec<LevelMargin> = Vec::new();
    for (i, ((z, &h), &t)) in points.iter().zip(h0).zip(targets).enumerate() {
        let value = scale * h;
        let margin = value - t;
        margins.push(margin);
        let level = z.level();
        if by_level.len() <= level as usize {
            by_level.extend((by_level.len() as u32..=level).map(|level| LevelMargin {
                level,
                points: 0,
                min_margin: f64::INFINITY,
                violations: 0,
            }));
        }
        let lm = &mut by_level[level as usize];
        lm.points += 1;
        lm.min_margin = lm.min_margin.min(margin);
        if margin < 0.0 {
            lm.violations += 1;
            violations.push(MinorantViolation {
                index: i,
                level,
                value,
                target: t,
            });
        }
    }
    by_level.retain(|l| l.points > 0);
    margins.sort_by(f64::total_cmp);
    MinorantReport {
        scale,
        checked: points.len(),
        violations,
        min_margin: margins.first().copied().unwrap_or(f64::INFINITY),
        median_margin: margins.get(margins.len() / 2).copied().unwrap_or(f64::INFINITY),
        by_level,
    }
}

/// Checks `C·P[μ](a_k) >= target_k` for every point.
pub fn verify_minorant_witness(points: &[DiskPoint], targets: &[f64], witness: &HarmonicWitness) -> Result<MinorantReport> {
    if points.len() != targets.len() {
        return Err(invalid(format!("{} points but {} targets", points.len(), targets.len())));
    }
    let h0: Vec<f64> = points.iter().map(|z| poisson_integral(&witness.base, z)).collect();
    Ok(report(points, &h0, targets, witness.scale))
}

/// Smallest power of two `C` with `C·h0_k >= target_k` for all `k`; `1` when
/// no target is positive.
pub fn calibrate_scale(h0: &[f64], targets: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (&h, &t) in h0.iter().zip(targets) {
        if t > 0.0 {
            if h <= 0.0 {
                return Err(invalid("a positive target sits where the Poisson integral vanishes"));
            }
            worst = worst.max(t / h);
        }
    }
    if worst == 0.0 {
        return Ok(1.0);
    }
    let ok = |c: f64| h0.iter().zip(targets).all(|(&h, &t)| c * h >= t);
    let mut k = worst.log2().ceil() as i32;
    while !ok(2f64.powi(k)) {
        k += 1;
    }
    while ok(2f64.powi(k - 1)) {
        k -= 1;
    }
    Ok(2f64.powi(k))
}

/// A calibrated witness with its checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessRun {
    pub witness: HarmonicWitness,
    pub points: Vec<DiskPoint>,
    pub targets: Vec<f64>,
    pub report: MinorantReport,
    /// The same check at `C/2`.
    pub halved: MinorantReport,
    /// `min h₀(p_{n,j}) / 2^{l_n}` over every selected arc, when defined.
    pub level_constant: Option<f64>,
    /// Points where `ln |f| > ln g(|a_k|)`.
    pub modulus_violations: Vec<usize>,
    /// `max ln |f(a_k)|`; at most `0`.
    pub max_log_modulus: f64,
}

fn run(points: Vec<DiskPoint>, targets: Vec<f64>, base: CircleMeasure, zeros: Vec<DiskPoint>) -> Result<WitnessRun> {
    let h0: Vec<f64> = points.iter().map(|z| poisson_integral(&base, z)).collect();
    let scale = calibrate_scale(&h0, &targets)?;
    let rep = report(&points, &h0, &targets, scale);
    let halved = report(&points, &h0, &targets, scale / 2.0);
    let mut modulus_violations = Vec::new();
    let mut max_log_modulus = f64::NEG_INFINITY;
    for (i, (z, &h)) in points.iter().zip(&h0).enumerate() {
        let ln_f = blaschke_log(&zeros, z).0 - scale * h;
        max_log_modulus = max_log_modulus.max(ln_f);
        if ln_f > -targets[i] {
            modulus_violations.push(i);
        }
    }
    Ok(WitnessRun {
        witness: HarmonicWitness::new(scale, base, zeros)?,
        points,
        targets,
        report: rep,
        halved,
        level_constant: None,
        modulus_violations,
        max_log_modulus,
    })
}

/// Calibrates `h = C·P[μ]` on the points `p` of a construction, with the
/// Blaschke factor vanishing on `b`, so `f = B·exp(-C·H)` satisfies
/// `|f(p_k)| <= g(|p_k|)`.
pub fn lemma61_witness(con: &Lemma61) -> Result<WitnessRun> {
    let (points, targets): (Vec<DiskPoint>, Vec<f64>) = con.p_with_targets().into_iter().unzip();
    let base = CircleMeasure::from_dyadic(con.measure.clone());
    let mut level_constant = f64::INFINITY;
    for n in 0..=con.depth() {
        let scale = 2f64.powi(con.selection.l[n] as i32);
        for &k in &con.selection.j[n] {
            let h = poisson_integral(&base, &crate::construction::dyadic_point(n, k));
            level_constant = level_constant.min(h / scale);
        }
    }
    let mut out = run(points, targets, base, con.b_points())?;
    out.level_constant = Some(level_constant);
    Ok(out)
}

/// The witness for a necessity construction: targets `g̃` at the points of
/// `q̃`, zeros on `ã ∪ b̃`.
pub fn necessity_witness(nec: &Necessity, g: &DecreaseFunction) -> Result<WitnessRun> {
    let (points, targets): (Vec<DiskPoint>, Vec<f64>) = nec.q_tilde_targets(g)?.into_iter().unzip();
    let zeros = nec.blaschke_part.iter().map(|t| t.point).collect();
    run(points, targets, CircleMeasure::from_dyadic(nec.base.measure.clone()), zeros)
}
