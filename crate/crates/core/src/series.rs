//! Convergence certificates for the parametric families used throughout the
//! crate, and growth-rate fits for everything else.
//!
//! Every parametric sequence here behaves like `c · n^p · (ln n)^q · b^n` for
//! large `n`. Products and quotients stay in the family, and the convergence
//! of `Σ c n^p (ln n)^q b^n` is decided by the ratio test (`b != 1`) and the
//! Bertrand series test (`b = 1`).

use std::ops::{Div, Mul};

use serde::{Deserialize, Serialize};

/// Leading-order behaviour `coeff · n^poly · (ln n)^log · base^n` as `n → ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Asymptotic {
    pub coeff: f64,
    pub poly: f64,
    pub log: f64,
    pub base: f64,
}

impl Asymptotic {
    pub const ONE: Asymptotic = Asymptotic {
        coeff: 1.0,
        poly: 0.0,
        log: 0.0,
        base: 1.0,
    };

    pub fn power(coeff: f64, poly: f64) -> Self {
        Asymptotic {
            coeff,
            poly,
            log: 0.0,
            base: 1.0,
        }
    }

    pub fn recip(self) -> Asymptotic {
        Asymptotic {
            coeff: 1.0 / self.coeff,
            poly: -self.poly,
            log: -self.log,
            base: 1.0 / self.base,
        }
    }

    /// Behaviour of `n ↦ f(n + k)`.
    pub fn shifted(self, k: f64) -> Asymptotic {
        Asymptotic {
            coeff: self.coeff * self.base.powf(k),
            ..self
        }
    }

    /// Behaviour of `n ↦ f(n / c)`. Shifts inside the logarithm are lower order.
    pub fn rescaled(self, c: f64) -> Asymptotic {
        Asymptotic {
            coeff: self.coeff * c.powf(-self.poly),
            poly: self.poly,
            log: self.log,
            base: self.base.powf(1.0 / c),
        }
    }

    /// Sign of the dominant exponent: `+1` grows, `-1` decays, `0` tends to a
    /// positive constant.
    fn growth_sign(&self) -> i8 {
        let cmp = |x: f64| -> i8 {
            if x > 0.0 {
                1
            } else if x < 0.0 {
                -1
            } else {
                0
            }
        };
        if self.base != 1.0 {
            return cmp(self.base - 1.0);
        }
        match cmp(self.poly) {
            0 => cmp(self.log),
            s => s,
        }
    }

    pub fn tends_to_infinity(&self) -> bool {
        self.growth_sign() > 0
    }

    pub fn tends_to_zero(&self) -> bool {
        self.growth_sign() < 0
    }

    /// Whether `Σ_n coeff n^poly (ln n)^log base^n` converges.
    pub fn series_converges(&self) -> bool {
        if self.base != 1.0 {
            return self.base < 1.0;
        }
        if self.poly != -1.0 {
            return self.poly < -1.0;
        }
        self.log < -1.0
    }

    /// Human-readable certificate for the convergence decision.
    pub fn certificate(&self) -> String {
        let verdict = if self.series_converges() {
            "converges"
        } else {
            "diverges"
        };
        if self.base != 1.0 {
            format!("ratio test: terms ~ b^n with b = {} ({verdict})", self.base)
        } else if self.poly != -1.0 {
            format!("p-series: terms ~ n^{} ({verdict})", self.poly)
        } else {
            format!("Bertrand series: terms ~ n^-1 (ln n)^{} ({verdict})", self.log)
        }
    }

    /// Leading-order estimate of `Σ_{n > horizon}` for a convergent series,
    /// from the integral of the asymptotic form.
    pub fn tail_estimate(&self, horizon: usize) -> Option<f64> {
        if !self.series_converges() {
            return None;
        }
        let n = (horizon.max(2)) as f64;
        let term = self.coeff * n.powf(self.poly) * n.ln().powf(self.log) * self.base.powf(n);
        if self.base < 1.0 {
            let b = self.base;
            return Some(term * b / (1.0 - b));
        }
        if self.poly < -1.0 {
            Some(term * n / (-self.poly - 1.0))
        } else {
            // poly == -1, log < -1
            Some(self.coeff * n.ln().powf(self.log + 1.0) / (-self.log - 1.0))
        }
    }
}

impl Mul for Asymptotic {
    type Output = Asymptotic;

    fn mul(self, o: Asymptotic) -> Asymptotic {
        Asymptotic {
            coeff: self.coeff * o.coeff,
            poly: self.poly + o.poly,
            log: self.log + o.log,
            base: self.base * o.base,
        }
    }
}

impl Div for Asymptotic {
    type Output = Asymptotic;

    fn div(self, o: Asymptotic) -> Asymptotic {
        Asymptotic {
            coeff: self.coeff / o.coeff,
            poly: self.poly - o.poly,
            log: self.log - o.log,
            base: self.base / o.base,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrendKind {
    Convergent,
    Divergent,
    Unclear,
}

/// Growth-rate fit of a finite run of nonnegative terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trend {
    pub kind: TrendKind,
    /// Least-squares slope of `ln t_n` against `ln n` over the second half.
    pub power_slope: Option<f64>,
    /// Least-squares slope of `ln t_n` against `n` over the second half.
    pub geometric_slope: Option<f64>,
}

fn slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    if xs.len() < 3 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

/// Classifies the terms `t_0, t_1, …` of a series by how fast they decay over
/// the second half of the window: faster than `n^{-1.5}` (or geometrically)
/// reads as convergent, slower than `1/n` as divergent.
pub fn fit_trend(terms: &[f64]) -> Trend {
    let start = terms.len() / 2;
    let tail: Vec<(f64, f64)> = terms
        .iter()
        .enumerate()
        .skip(start.max(1))
        .map(|(n, &t)| (n as f64, t))
        .collect();
    if tail.is_empty() || tail.iter().all(|&(_, t)| t == 0.0) {
        // finitely many nonzero terms
        return Trend {
            kind: TrendKind::Convergent,
            power_slope: None,
            geometric_slope: None,
        };
    }
    if tail.iter().any(|&(_, t)| t == 0.0) {
        // terms vanish intermittently: the tail is no longer sustained
        return Trend {
            kind: TrendKind::Unclear,
            power_slope: None,
            geometric_slope: None,
        };
    }
    let xs_log: Vec<f64> = tail.iter().map(|&(n, _)| n.ln()).collect();
    let xs: Vec<f64> = tail.iter().map(|&(n, _)| n).collect();
    let ys: Vec<f64> = tail.iter().map(|&(_, t)| t.ln()).collect();
    let power_slope = slope(&xs_log, &ys);
    let geometric_slope = slope(&xs, &ys);
    let kind = match (power_slope, geometric_slope) {
        (Some(p), _) if p >= -1.0 => TrendKind::Divergent,
        (Some(p), Some(g)) if p < -1.5 || g < -0.1 => TrendKind::Convergent,
        _ => TrendKind::Unclear,
    };
    Trend {
        kind,
        power_slope,
        geometric_slope,
    }
}
