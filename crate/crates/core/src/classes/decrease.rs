use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::series::Asymptotic;

/// A radial decay bound `g`, stored through its dyadic transform
/// `g̃(λ) = log 1/g(1 - 2^{-λ})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum DecreaseFunction {
    /// `g(r) = (1 - r)^β`, so `g̃(λ) = β λ ln 2`.
    Power { beta: f64 },
    /// `g(r) = exp(-c (1 - r)^{-β})`, so `g̃(λ) = c 2^{βλ}`.
    ExpInverse { c: f64, beta: f64 },
    /// `g(r) = exp(-log^β(1/(1 - r)))`, so `g̃(λ) = (λ ln 2)^β`.
    ExpLogPower { beta: f64 },
    /// `g̃(λ) = c (λ + shift)^p ln^q(λ + shift)`.
    Level { c: f64, shift: f64, p: f64, q: f64 },
    /// `g̃(n)` for `n < len`, piecewise constant on `[n, n + 1)`.
    Table(Vec<f64>),
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive and finite, got {x}")))
    }
}

impl DecreaseFunction {
    pub fn power(beta: f64) -> Result<Self> {
        positive("beta", beta)?;
        Ok(DecreaseFunction::Power { beta })
    }

    pub fn exp_inverse(c: f64, beta: f64) -> Result<Self> {
        positive("c", c)?;
        positive("beta", beta)?;
        Ok(DecreaseFunction::ExpInverse { c, beta })
    }

    pub fn exp_log_power(beta: f64) -> Result<Self> {
        positive("beta", beta)?;
        Ok(DecreaseFunction::ExpLogPower { beta })
    }

    /// Requires `shift >= 1` so the logarithm is nonnegative, and `p > 0` or
    /// `q > 0` so `g̃` is unbounded.
    pub fn level(c: f64, shift: f64, p: f64, q: f64) -> Result<Self> {
        positive("c", c)?;
        if !(shift.is_finite() && shift >= 1.0) {
            return Err(invalid(format!("shift must be at least 1, got {shift}")));
        }
        if !(p.is_finite() && q.is_finite() && p >= 0.0 && q >= 0.0 && p + q > 0.0) {
            return Err(invalid(format!("need p, q >= 0 with p + q > 0, got p = {p}, q = {q}")));
        }
        Ok(DecreaseFunction::Level { c, shift, p, q })
    }

    /// A table of `g̃(0), g̃(1), …`; must be finite, nonnegative and nondecreasing.
    pub fn table(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("empty g̃ table"));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(invalid(format!("g̃ table entries must be finite and nonnegative, got {v}")));
        }
        if let Some(i) = values.windows(2).position(|w| w[1] < w[0]) {
            return Err(invalid(format!("g̃ table decreases at index {}", i + 1)));
        }
        Ok(DecreaseFunction::Table(values))
    }

    /// `g̃(λ)`.
    pub fn gtilde(&self, lambda: f64) -> Result<f64> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(invalid(format!("λ must be finite and nonnegative, got {lambda}")));
        }
        let v = match *self {
            DecreaseFunction::Power { beta } => beta * lambda * LN_2,
            DecreaseFunction::ExpInverse { c, beta } => c * (beta * lambda).exp2(),
            DecreaseFunction::ExpLogPower { beta } => (lambda * LN_2).powf(beta),
            DecreaseFunction::Level { c, shift, p, q } => {
                let x = lambda + shift;
                c * x.powf(p) * x.ln().powf(q)
            }
            DecreaseFunction::Table(ref t) => {
                let n = lambda.floor() as usize;
                return t.get(n).copied().ok_or(Error::OutOfTable { index: n, len: t.len() });
            }
        };
        if !v.is_finite() {
            return Err(invalid(format!("g̃({lambda}) overflows")));
        }
        Ok(v)
    }

    /// `g̃(0), …, g̃(horizon)`.
    pub fn values(&self, horizon: usize) -> Result<Vec<f64>> {
        (0..=horizon).map(|n| self.gtilde(n as f64)).collect()
    }

    /// `g(r) = exp(-g̃(log₂ 1/(1 - r)))`.
    pub fn g(&self, r: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::OutsideDisk { rho: r });
        }
        Ok((-self.gtilde(-(1.0 - r).log2())?).exp())
    }

    /// Largest index the representation can evaluate, if bounded.
    pub fn max_index(&self) -> Option<usize> {
        match self {
            DecreaseFunction::Table(t) => Some(t.len() - 1),
            _ => None,
        }
    }

    /// Behaviour of `g̃(n)` as `n → ∞`, for the parametric families.
    pub fn asymptotic(&self) -> Option<Asymptotic> {
        match *self {
            DecreaseFunction::Power { beta } => Some(Asymptotic::power(beta * LN_2, 1.0)),
            DecreaseFunction::ExpInverse { c, beta } => Some(Asymptotic {
                coeff: c,
                poly: 0.0,
                log: 0.0,
                base: beta.exp2(),
            }),
            DecreaseFunction::ExpLogPower { beta } => Some(Asymptotic::power(LN_2.powf(beta), beta)),
            DecreaseFunction::Level { c, p, q, .. } => Some(Asymptotic {
                coeff: c,
                poly: p,
                log: q,
                base: 1.0,
            }),
            DecreaseFunction::Table(_) => None,
        }
    }
}

impl fmt::Display for DecreaseFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecreaseFunction::Power { beta } => write!(f, "power:{beta}"),
            DecreaseFunction::ExpInverse { c, beta } => write!(f, "exp-inverse:{c},{beta}"),
            DecreaseFunction::ExpLogPower { beta } => write!(f, "exp-log:{beta}"),
            DecreaseFunction::Level { c, shift, p, q } => write!(f, "level:{c},{shift},{p},{q}"),
            DecreaseFunction::Table(t) => write!(f, "table[{}]", t.len()),
        }
    }
}

pub(crate) fn parse_params(s: &str, what: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| invalid(format!("bad {what} parameter `{p}`")))
        })
        .collect()
}

/// Parses `power:β`, `exp-inverse:c,β`, `exp-log:β` and `level:c,shift,p,q`.
impl FromStr for DecreaseFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (family, params) = s.split_once(':').unwrap_or((s, ""));
        let p = parse_params(params, "g")?;
        let arity = |n: usize| -> Result<()> {
            if p.len() == n {
                Ok(())
            } else {
                Err(invalid(format!("`{family}` takes {n} parameter(s), got {}", p.len())))
            }
        };
        match family.trim() {
            "power" => {
                arity(1)?;
                DecreaseFunction::power(p[0])
            }
            "exp-inverse" => {
                arity(2)?;
                DecreaseFunction::exp_inverse(p[0], p[1])
            }
            "exp-log" => {
                arity(1)?;
                DecreaseFunction::exp_log_power(p[0])
            }
            "level" => {
                arity(4)?;
                DecreaseFunction::level(p[0], p[1], p[2], p[3])
            }
            other => Err(invalid(format!("unknown g family `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let lin = DecreaseFunction::power(1.0).unwrap();
        assert!((lin.gtilde(5.0).unwrap() - 5.0 * LN_2).abs() < 1e-15);
        assert!((lin.g(0.75).unwrap() - 0.25).abs() < 1e-15);
        let ei = DecreaseFunction::exp_inverse(1.0, 1.0).unwrap();
        assert_eq!(ei.gtilde(10.0).unwrap(), 1024.0);
        assert!((ei.g(0.5).unwrap() - (-2.0f64).exp()).abs() < 1e-15);
        let el = DecreaseFunction::exp_log_power(2.0).unwrap();
        assert!((el.gtilde(3.0).unwrap() - (3.0 * LN_2).powi(2)).abs() < 1e-14);
        let r: f64 = 0.9;
        assert!((el.g(r).unwrap() - (-(1.0 / (1.0 - r)).ln().powi(2)).exp()).abs() < 1e-14);
    }

    #[test]
    fn table_lookup() {
        let t = DecreaseFunction::table(vec![1.0, 2.0, 2.0, 5.0]).unwrap();
        assert_eq!(t.gtilde(2.7).unwrap(), 2.0);
        assert_eq!(t.gtilde(4.0), Err(Error::OutOfTable { index: 4, len: 4 }));
        assert!(DecreaseFunction::table(vec![2.0, 1.0]).is_err());
        assert!(DecreaseFunction::table(vec![-1.0]).is_err());
        assert!(DecreaseFunction::table(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn parse_round_trip() {
        for s in ["power:1", "exp-inverse:2,0.5", "exp-log:2", "level:1,2,0,1"] {
            let g: DecreaseFunction = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
        }
        assert!("power".parse::<DecreaseFunction>().is_err());
        assert!("power:-1".parse::<DecreaseFunction>().is_err());
        assert!("level:1,0.5,1,0".parse::<DecreaseFunction>().is_err());
        assert!("wobble:1".parse::<DecreaseFunction>().is_err());
    }
}
