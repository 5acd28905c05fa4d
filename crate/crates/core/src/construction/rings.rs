use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::classes::{Certified, ClassEvidence, SequenceClass, WeightSequence};
use crate::error::{invalid, Result};
use crate::geometry::{DiskPoint, StolzAperture, MIN_COVERING_APERTURE};
use crate::series::Asymptotic;

/// The shell indices `n_0 < n_1 < …` of a ring sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RingLevels {
    Explicit { levels: Vec<u32> },
    /// `n_k = start + step·k`.
    Arithmetic { start: u32, step: u32 },
    /// `n_k = start·ratio^k`.
    Geometric { start: u32, ratio: u32 },
}

/// Rings of `2^{n_k}` equispaced points at radius `1 - 2^{-n_k}`, kept
/// symbolic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingSequence {
    pub levels: RingLevels,
    pub alpha: f64,
}

/// How many points of one ring see a boundary point, for almost every angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingCoverage {
    pub n: u32,
    pub min: u64,
    pub max: u64,
}

/// Rings are described up to this shell. Coverage only needs `2^{-n}`, which
/// stays a normal `f64` well past it.
pub const MAX_RING_LEVEL: u32 = 1000;

pub fn ring_counterexample(levels: RingLevels, alpha: StolzAperture) -> Result<RingSequence> {
    match &levels {
        RingLevels::Explicit { levels } => {
            if levels.windows(2).any(|w| w[1] <= w[0]) {
                return Err(invalid("ring levels must be strictly increasing"));
            }
            if levels.last().is_some_and(|&n| n > MAX_RING_LEVEL) {
                return Err(invalid(format!("ring levels above {MAX_RING_LEVEL} are not representable")));
            }
        }
        RingLevels::Arithmetic { step, .. } if *step == 0 => return Err(invalid("arithmetic ring step must be positive")),
        RingLevels::Geometric { start, ratio } if *start == 0 || *ratio < 2 => {
            return Err(invalid("geometric rings need start >= 1 and ratio >= 2"))
        }
        _ => {}
    }
    Ok(RingSequence {
        levels,
        alpha: alpha.value(),
    })
}

/// Points of one ring `k` seen from almost every boundary point.
pub fn ring_coverage(n: u32, alpha: StolzAperture) -> RingCoverage {
    let count = if n < 64 { 1u64 << n } else { u64::MAX };
    // half-width 2 asin(s) with s = d sqrt(α(2+α)/(1-d)) / 2 and d = 1 - ρ
    let d = 2f64.powi(-(n as i32));
    let a = alpha.value();
    let s = d * (a * (2.0 + a) / (1.0 - d)).sqrt() / 2.0;
    if s >= 1.0 {
        return RingCoverage { n, min: count, max: count };
    }
    // points per arc: 2·hw / (2π 2^{-n})
    let ratio = 2.0 * s.asin() / (std::f64::consts::PI * d);
    RingCoverage {
        n,
        min: (ratio.floor() as u64).min(count),
        max: (ratio.ceil() as u64).min(count),
    }
}

impl RingSequence {
    fn aperture(&self) -> StolzAperture {
        StolzAperture::new(self.alpha).expect("validated at construction")
    }

    /// `n_k`, if the ring exists and is representable.
    pub fn level(&self, k: usize) -> Option<u32> {
        let n = match &self.levels {
            RingLevels::Explicit { levels } => *levels.get(k)? as u64,
            RingLevels::Arithmetic { start, step } => *start as u64 + *step as u64 * k as u64,
            RingLevels::Geometric { start, ratio } => {
                let p = (*ratio as u64).checked_pow(u32::try_from(k).ok()?)?;
                (*start as u64).checked_mul(p)?
            }
        };
        (n <= MAX_RING_LEVEL as u64).then_some(n as u32)
    }

    /// The representable rings, in order.
    pub fn rings(&self) -> Vec<u32> {
        (0..).map_while(|k| self.level(k)).collect()
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.levels, RingLevels::Explicit { .. })
    }

    pub fn per_ring_coverage(&self) -> Vec<RingCoverage> {
        let a = self.aperture();
        self.rings().into_iter().map(|n| ring_coverage(n, a)).collect()
    }

    /// `ess inf φ` over the first `k` rings.
    pub fn min_phi(&self, k: usize) -> u64 {
        self.per_ring_coverage().iter().take(k).map(|c| c.min).sum()
    }

    /// `Σ (1 - |a|)` over the first `k` rings: one per ring.
    pub fn blaschke_partial_sum(&self, k: usize) -> f64 {
        self.rings().len().min(k) as f64
    }

    /// The points of ring `n` (for small `n` only).
    pub fn ring_points(n: u32) -> Result<Vec<DiskPoint>> {
        if n > 22 {
            return Err(crate::error::Error::TooLarge(format!("ring {n} has 2^{n} points")));
        }
        let m = 1u64 << n;
        let rho = 1.0 - 2f64.powi(-(n as i32));
        (0..m).map(|j| DiskPoint::new(rho, TAU * j as f64 / m as f64)).collect()
    }

    /// Every ring covers the circle almost everywhere at this aperture.
    fn covers(&self) -> bool {
        self.alpha >= MIN_COVERING_APERTURE || self.per_ring_coverage().iter().all(|c| c.min >= 1) && self.is_finite()
    }

    /// Behaviour of `w(n_k)` in `k`, or a direct decision for super-geometric decay.
    fn ring_terms(&self, w: &Asymptotic) -> Option<std::result::Result<Asymptotic, String>> {
        match self.levels {
            RingLevels::Explicit { .. } => None,
            RingLevels::Arithmetic { start, step } => {
                let (a, d) = (start as f64, step as f64);
                Some(Ok(Asymptotic {
                    coeff: w.coeff * d.powf(w.poly) * w.base.powf(a),
                    poly: w.poly,
                    log: w.log,
                    base: w.base.powf(d),
                }))
            }
            RingLevels::Geometric { start, ratio } => {
                if w.base < 1.0 {
                    return Some(Err(format!("w(n_k) <= C {}^(n_k) with n_k = {start}·{ratio}^k: super-geometric decay (converges)", w.base)));
                }
                let (a, r) = (start as f64, ratio as f64);
                Some(Ok(Asymptotic {
                    coeff: w.coeff * a.powf(w.poly) * r.ln().powf(w.log),
                    poly: w.log,
                    log: 0.0,
                    base: r.powf(w.poly),
                }))
            }
        }
    }
}

impl ClassEvidence for RingSequence {
    fn separated(&self) -> bool {
        true
    }

    fn coverage(&self, horizon: usize) -> Vec<f64> {
        let per = self.per_ring_coverage();
        let mut out = vec![0.0; horizon + 1];
        out[0] = TAU;
        let mut guaranteed = 0u64;
        for c in &per {
            guaranteed += c.min;
        }
        for (n, m) in out.iter_mut().enumerate().skip(1) {
            if (n as u64) <= guaranteed || (!self.is_finite() && self.covers()) {
                *m = TAU;
            }
        }
        out
    }

    fn level_mass(&self, horizon: usize) -> Vec<f64> {
        let mut out = vec![0.0; horizon + 1];
        for n in self.rings() {
            if let Some(m) = out.get_mut(n as usize) {
                *m = 1.0;
            }
        }
        out
    }

    fn data_horizon(&self) -> Option<usize> {
        match &self.levels {
            RingLevels::Explicit { levels } => {
                let deepest = levels.last().copied().unwrap_or(0) as usize;
                let cover: u64 = self.per_ring_coverage().iter().map(|c| c.max).sum();
                Some(deepest.max(cover as usize))
            }
            _ => None,
        }
    }

    fn certify(&self, class: SequenceClass, weight: &WeightSequence) -> Option<Certified> {
        if self.is_finite() {
            return Some(Certified {
                member: false,
                reason: format!("finitely many rings: Blaschke sum {}", self.rings().len()),
            });
        }
        match class {
            SequenceClass::P => {
                let wa = weight.asymptotic()?;
                match self.ring_terms(&wa)? {
                    Ok(t) => Some(Certified {
                        member: !t.series_converges(),
                        reason: format!("each ring adds w(n_k); {}", t.certificate()),
                    }),
                    Err(text) => Some(Certified {
                        member: false,
                        reason: text,
                    }),
                }
            }
            SequenceClass::S if self.covers() => {
                let diverges = weight.sum_diverges()?;
                Some(Certified {
                    member: diverges,
                    reason: "every ring covers the circle, so m(n) = 2π for all n".into(),
                })
            }
            SequenceClass::L if self.covers() => Some(Certified {
                member: true,
                reason: "every ring covers the circle, so m(n) = 2π and m(n)/v_n >= 2π/sup v".into(),
            }),
            _ => None,
        }
    }
}
