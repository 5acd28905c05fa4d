use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use super::{clamp_horizon, trend_word, CriterionReport, DecreaseFunction, Verdict, WeightSequence};
use crate::counting::{coverage_distribution, weighted_coverage, weighted_phi_at};
use crate::error::{invalid, Result};
use crate::geometry::{separation_constant, stolz_arc, DiskPoint, StolzAperture};
use crate::series::fit_trend;

/// The function `W_a = Σ_k χ_{I_{a_k}} w(⌊log₂ 1/(1 - |a_k|)⌋)` and the
/// chain of bounds relating `∫ W_a` to `Σ m_a(n) w_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaReport {
    /// `∫ W_a` from the sweep.
    pub integral: f64,
    /// `Σ_k |I_{a_k}| w(level_k)`.
    pub integral_closed_form: f64,
    /// Most points of one shell inside a single Stolz angle.
    pub per_level_bound: usize,
    /// `max_θ W_a(θ) / Σ_{i < φ_a(θ)} w_i`; at most `per_level_bound`.
    pub chain_ratio: f64,
    /// `Σ_{n >= 1} m_a(n) w_{n-1}`.
    pub layer_sum: f64,
    /// `integral / layer_sum`; at most `per_level_bound`.
    pub layer_ratio: f64,
}

/// `W_a(θ)` at a single angle.
pub fn wa_at(a: &[DiskPoint], w: &WeightSequence, alpha: StolzAperture, theta: f64) -> Result<f64> {
    for z in a {
        w.value(z.level() as usize)?;
    }
    Ok(weighted_phi_at(a, theta, alpha, |lvl| w.value(lvl as usize).unwrap_or(0.0)))
}

pub fn wa_function(a: &[DiskPoint], w: &WeightSequence, alpha: StolzAperture) -> Result<WaReport> {
    if a.len() >= 2 && !separation_constant(a)?.separated {
        return Err(invalid("W_a is only considered for separated sequences"));
    }
    let max_level = a.iter().map(|z| z.level() as usize).max().unwrap_or(0);
    let coverage = coverage_distribution(a, alpha);
    let reach = max_level.max(coverage.max_coverage());
    let wv = w.values(reach)?;
    let mut prefix = vec![0.0; reach + 2];
    for i in 0..=reach {
        prefix[i + 1] = prefix[i] + wv[i];
    }
    let sweep = weighted_coverage(a, alpha, |lvl| wv[lvl as usize], |n| prefix[n.min(reach + 1)]);
    let integral_closed_form = a
        .iter()
        .map(|z| stolz_arc(z, alpha).length() * wv[z.level() as usize])
        .sum();
    let layer_sum: f64 = coverage.entries().iter().map(|&(n, m)| m * wv[n - 1]).sum();
    Ok(WaReport {
        integral: sweep.integral,
        integral_closed_form,
        per_level_bound: sweep.max_per_level,
        chain_ratio: sweep.max_ratio,
        layer_sum,
        layer_ratio: if layer_sum > 0.0 { sweep.integral / layer_sum } else { 0.0 },
    })
}

/// `∫_n^{n+1} 2^{λ-n} / g̃(λ) dλ` by composite Simpson.
fn annulus_average(g: &DecreaseFunction, n: usize) -> Result<f64> {
    if let DecreaseFunction::Table(_) = g {
        // piecewise constant: the weight 2^{λ-n} ln 2 integrates to 1
        return Ok(1.0 / (g.gtilde(n as f64)? * LN_2));
    }
    const STEPS: usize = 64;
    let h = 1.0 / STEPS as f64;
    let mut acc = 0.0;
    for i in 0..=STEPS {
        let t = i as f64 * h;
        let f = t.exp2() / g.gtilde(n as f64 + t)?;
        let c = if i == 0 || i == STEPS {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += c * f;
    }
    Ok(acc * h / 3.0)
}

/// The integral form of the summatory criterion,
/// `∫ f(1 - r) dr / ((1 - r)² log 1/g(r)) < ∞` with `f(x) = w_n x` on
/// `(2^{-n-1}, 2^{-n}]`. Over that annulus the integral is
/// `w_n ln 2 ∫_n^{n+1} 2^{λ-n}/g̃(λ) dλ`, which lies between
/// `w_n/g̃(n+1)` and `w_n/g̃(n)`.
///
/// Holds when `g` is an essential minorant for `P_w`. Annuli where `g̃`
/// vanishes at the inner edge are skipped.
pub fn criterion_summatory_integral(g: &DecreaseFunction, w: &WeightSequence, horizon: usize) -> Result<CriterionReport> {
    let mut notes = Vec::new();
    let horizon = clamp_horizon(horizon, &[g.max_index(), w.max_index()], &mut notes);
    let gt = g.values(horizon)?;
    let n0 = gt
        .iter()
        .position(|&v| v > 0.0)
        .ok_or_else(|| invalid("g̃ vanishes on the whole horizon"))?;
    if n0 > 0 {
        notes.push(format!("annuli n < {n0} skipped (g̃ vanishes there)"));
    }
    let mut terms = Vec::new();
    for n in n0..=horizon {
        terms.push(w.value(n)? * LN_2 * annulus_average(g, n)?);
    }
    let mut r = CriterionReport::new("integral f(1-r)/((1-r)^2 log 1/g(r)) dr", horizon);
    r.notes = notes;
    let mut acc = 0.0;
    for (i, t) in terms.iter().enumerate() {
        acc += t;
        r.series.push((n0 + i, acc));
    }
    r.partial_sum = Some(acc);
    let trend = fit_trend(&terms);
    if let (Some(wa), Some(ga)) = (w.asymptotic(), g.asymptotic()) {
        let upper = wa / ga;
        let lower = wa / ga.shifted(1.0);
        if upper.series_converges() {
            r.verdict = Verdict::Holds;
            r.certificate = Some(format!("annulus integrals <= w_n/g~(n); {}", upper.certificate()));
            r.tail_estimate = upper.tail_estimate(horizon);
        } else if !lower.series_converges() {
            r.verdict = Verdict::Fails;
            r.certificate = Some(format!("annulus integrals >= w_n/g~(n+1); {}", lower.certificate()));
        }
    } else {
        r.notes.push(format!("no parametric tail; terms look {}", trend_word(trend.kind)));
    }
    r.trend = Some(trend);
    Ok(r)
}
