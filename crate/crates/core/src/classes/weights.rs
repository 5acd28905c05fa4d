use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::decrease::parse_params;
use crate::error::{invalid, Error, Result};
use crate::series::Asymptotic;

/// Whether a weight enters a divergence class (`w`, for `S_w` and `P_w`) or a
/// liminf class (`v`, for `L_v`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightRole {
    W,
    V,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum WeightKind {
    Constant { c: f64 },
    /// `(n + shift)^{-β} ln^{-γ}(n + shift)`.
    Power { shift: f64, beta: f64, log_power: f64 },
    /// `r^n`.
    Geometric { ratio: f64 },
    Table { values: Vec<f64> },
}

/// A nonincreasing bounded nonnegative sequence `w_0, w_1, …`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSequence {
    pub kind: WeightKind,
    pub role: WeightRole,
}

impl WeightSequence {
    pub fn constant(c: f64, role: WeightRole) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(invalid(format!("constant weight must be positive, got {c}")));
        }
        Ok(WeightSequence {
            kind: WeightKind::Constant { c },
            role,
        })
    }

    /// `(n + shift)^{-β} ln^{-γ}(n + shift)`; `γ > 0` needs `shift > 1`.
    pub fn power(shift: f64, beta: f64, log_power: f64, role: WeightRole) -> Result<Self> {
        if !(shift.is_finite() && shift >= 1.0) {
            return Err(invalid(format!("shift must be at least 1, got {shift}")));
        }
        if !(beta.is_finite() && beta >= 0.0 && log_power.is_finite() && log_power >= 0.0) {
            return Err(invalid("beta and gamma must be nonnegative"));
        }
        if log_power > 0.0 && shift <= 1.0 {
            return Err(invalid("a log factor needs shift > 1"));
        }
        Ok(WeightSequence {
            kind: WeightKind::Power {
                shift,
                beta,
                log_power,
            },
            role,
        })
    }

    pub fn geometric(ratio: f64, role: WeightRole) -> Result<Self> {
        if !(ratio > 0.0 && ratio <= 1.0) {
            return Err(invalid(format!("geometric ratio must lie in (0, 1], got {ratio}")));
        }
        Ok(WeightSequence {
            kind: WeightKind::Geometric { ratio },
            role,
        })
    }

    pub fn table(values: Vec<f64>, role: WeightRole) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("empty weight table"));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(invalid(format!("weights must be finite and nonnegative, got {v}")));
        }
        if let Some(i) = values.windows(2).position(|w| w[1] > w[0]) {
            return Err(invalid(format!("weights increase at index {}", i + 1)));
        }
        Ok(WeightSequence {
            kind: WeightKind::Table { values },
            role,
        })
    }

    /// `w(n) = f(2^{-n}) / 2^{-n}` for `n <= horizon`, reading `f` as constant
    /// on `(2^{-n-1}, 2^{-n}]`.
    pub fn from_summatory<F: Fn(f64) -> f64>(f: F, horizon: usize, role: WeightRole) -> Result<Self> {
        let values = (0..=horizon)
            .map(|n| {
                let x = (-(n as f64)).exp2();
                f(x) / x
            })
            .collect();
        Self::table(values, role)
    }

    pub fn with_role(mut self, role: WeightRole) -> Self {
        self.role = role;
        self
    }

    /// `w_n`.
    pub fn value(&self, n: usize) -> Result<f64> {
        let x = n as f64;
        Ok(match self.kind {
            WeightKind::Constant { c } => c,
            WeightKind::Power {
                shift,
                beta,
                log_power,
            } => {
                let y = x + shift;
                let mut v = y.powf(-beta);
                if log_power != 0.0 {
                    v *= y.ln().powf(-log_power);
                }
                v
            }
            WeightKind::Geometric { ratio } => ratio.powf(x),
            WeightKind::Table { ref values } => {
                return values.get(n).copied().ok_or(Error::OutOfTable {
                    index: n,
                    len: values.len(),
                })
            }
        })
    }

    /// `w_0, …, w_horizon`.
    pub fn values(&self, horizon: usize) -> Result<Vec<f64>> {
        (0..=horizon).map(|n| self.value(n)).collect()
    }

    pub fn max_index(&self) -> Option<usize> {
        match &self.kind {
            WeightKind::Table { values } => Some(values.len() - 1),
            _ => None,
        }
    }

    pub fn asymptotic(&self) -> Option<Asymptotic> {
        match self.kind {
            WeightKind::Constant { c } => Some(Asymptotic { coeff: c, ..Asymptotic::ONE }),
            WeightKind::Power { beta, log_power, .. } => Some(Asymptotic {
                coeff: 1.0,
                poly: -beta,
                log: -log_power,
                base: 1.0,
            }),
            WeightKind::Geometric { ratio } => Some(Asymptotic {
                base: ratio,
                ..Asymptotic::ONE
            }),
            WeightKind::Table { .. } => None,
        }
    }

    /// Certified answer to "does `Σ w_n` diverge", when the family decides it.
    pub fn sum_diverges(&self) -> Option<bool> {
        self.asymptotic().map(|a| !a.series_converges())
    }
}

impl fmt::Display for WeightSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            WeightKind::Constant { c } => write!(f, "const:{c}"),
            WeightKind::Power {
                shift,
                beta,
                log_power,
            } => {
                if *log_power == 0.0 {
                    write!(f, "power:{shift},{beta}")
                } else {
                    write!(f, "power:{shift},{beta},{log_power}")
                }
            }
            WeightKind::Geometric { ratio } => write!(f, "geometric:{ratio}"),
            WeightKind::Table { values } => write!(f, "table[{}]", values.len()),
        }
    }
}

/// Parses `const:c`, `power:shift,β[,γ]` and `geometric:r` as `w`-type weights.
impl FromStr for WeightSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (family, params) = s.split_once(':').unwrap_or((s, ""));
        let p = parse_params(params, "weight")?;
        let role = WeightRole::W;
        match (family.trim(), p.len()) {
            ("const", 1) => WeightSequence::constant(p[0], role),
            ("power", 2) => WeightSequence::power(p[0], p[1], 0.0, role),
            ("power", 3) => WeightSequence::power(p[0], p[1], p[2], role),
            ("geometric", 1) => WeightSequence::geometric(p[0], role),
            ("const" | "power" | "geometric", n) => Err(invalid(format!("wrong number of parameters ({n}) for `{family}`"))),
            (other, _) => Err(invalid(format!("unknown weight family `{other}`"))),
        }
    }
}
