use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::classes::{DecreaseFunction, WeightSequence};
use crate::error::{invalid, Result};
use crate::geometry::DiskPoint;
use crate::series::{fit_trend, Trend, TrendKind};

/// Quadrature grid over the annuli `2^{-n-1} < 1 - |z| <= 2^{-n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Annuli `0..levels`.
    pub levels: usize,
    /// Midpoint nodes in `t = log₂(1/(1-|z|)) - n`.
    pub radial: usize,
    /// Angular nodes on annulus `n` are `angular · 2^n`, capped at `2^22`.
    pub angular: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            levels: 12,
            radial: 4,
            angular: 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AreaVerdict {
    Finite,
    DivergentAtResolution,
    Unclear,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AreaReport {
    /// Contribution of each annulus to `∫_{E_g(u)} f(1-|z|)/(1-|z|)² dλ₂`.
    pub per_annulus: Vec<f64>,
    /// Share of each annulus (in the measure `r dr dθ`) lying in `E_g(u)`.
    pub fraction: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub trend: Trend,
    pub verdict: AreaVerdict,
}

/// Integrates `f(1-|z|)/(1-|z|)²` over `E_g(u) = {u(z) > g̃(log₂ 1/(1-|z|))}`,
/// with `f(x) = w_n x` on annulus `n`.
///
/// Writing `1 - r = 2^{-n-t}`, the area element `r dr dθ` over annulus `n`
/// becomes `ln 2 · 2^{-n-t} r dt dθ`, so each annulus contributes
/// `w_n ln 2 ∫∫ 1_E r dt dθ`.
pub fn area_integral_check<U>(u: U, g: &DecreaseFunction, w: &WeightSequence, grid: GridSpec) -> Result<AreaReport>
where
    U: Fn(&DiskPoint) -> f64,
{
    if grid.levels == 0 || grid.radial == 0 || grid.angular == 0 {
        return Err(invalid("grid needs at least one annulus and one node per direction"));
    }
    let mut per_annulus = Vec::with_capacity(grid.levels);
    let mut fraction = Vec::with_capacity(grid.levels);
    for n in 0..grid.levels {
        let wn = w.value(n)?;
        let angular = (grid.angular as u64).saturating_mul(1u64 << n.min(40)).min(1 << 22) as usize;
        let dt = 1.0 / grid.radial as f64;
        let dth = TAU / angular as f64;
        let mut inside = 0.0;
        let mut total = 0.0;
        for i in 0..grid.radial {
            let t = (i as f64 + 0.5) * dt;
            let lambda = n as f64 + t;
            let r = 1.0 - (-lambda).exp2();
            let threshold = g.gtilde(lambda)?;
            let mut hits = 0usize;
            for k in 0..angular {
                let z = DiskPoint::new(r, (k as f64 + 0.5) * dth)?;
                if u(&z) > threshold {
                    hits += 1;
                }
            }
            inside += hits as f64 * r;
            total += angular as f64 * r;
        }
        fraction.push(inside / total);
        per_annulus.push(wn * std::f64::consts::LN_2 * inside * dt * dth);
    }
    let partial_sums = per_annulus
        .iter()
        .scan(0.0, |s, &x| {
            *s += x;
            Some(*s)
        })
        .collect();
    let trend = fit_trend(&per_annulus);
    let verdict = match trend.kind {
        TrendKind::Convergent => AreaVerdict::Finite,
        TrendKind::Divergent => AreaVerdict::DivergentAtResolution,
        TrendKind::Unclear => AreaVerdict::Unclear,
    };
    Ok(AreaReport {
        per_annulus,
        fraction,
        partial_sums,
        trend,
        verdict,
    })
}
