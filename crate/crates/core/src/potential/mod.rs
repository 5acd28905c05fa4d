//! Poisson and Herglotz transforms of measures on the circle, Blaschke
//! products, and the bounded functions `B·exp(-C·H)` built from them.

mod area;
mod witness;

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::construction::DyadicMeasure;
use crate::error::{invalid, Result};
use crate::geometry::{gleason_distance, normalize_angle, DiskPoint};

pub use area::{area_integral_check, AreaReport, AreaVerdict, GridSpec};
pub use witness::{
    calibrate_scale, lemma61_witness, necessity_witness, verify_minorant_witness, LevelMargin, MinorantReport,
    MinorantViolation, WitnessRun,
};

/// Arc `[start, start + len)` carrying `mass` with uniform density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformArc {
    pub start: f64,
    pub len: f64,
    pub mass: f64,
}

/// A finite positive measure on the circle: a dyadic Cantor-type part plus
/// point masses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircleMeasure {
    pub dyadic: Option<DyadicMeasure>,
    /// `(angle, mass)`.
    pub atoms: Vec<(f64, f64)>,
    #[serde(skip)]
    arcs: Vec<UniformArc>,
}

impl CircleMeasure {
    pub fn new(dyadic: Option<DyadicMeasure>, atoms: Vec<(f64, f64)>) -> Result<Self> {
        if let Some(&(t, m)) = atoms.iter().find(|(t, m)| !(t.is_finite() && m.is_finite() && *m >= 0.0)) {
            return Err(invalid(format!("atom ({t}, {m}) needs a finite angle and a nonnegative mass")));
        }
        let arcs = dyadic
            .as_ref()
            .map(|d| {
                d.runs()
                    .into_iter()
                    .map(|(a, b, mass)| UniformArc { start: a, len: b - a, mass })
                    .collect()
            })
            .unwrap_or_default();
        Ok(CircleMeasure {
            dyadic,
            atoms: atoms.into_iter().map(|(t, m)| (normalize_angle(t), m)).collect(),
            arcs,
        })
    }

    pub fn from_dyadic(mu: DyadicMeasure) -> Self {
        Self::new(Some(mu), Vec::new()).expect("dyadic measures are valid")
    }

    pub fn atom(angle: f64, mass: f64) -> Result<Self> {
        Self::new(None, vec![(angle, mass)])
    }

    /// Arcs of uniform density carrying the dyadic part.
    pub fn arcs(&self) -> &[UniformArc] {
        &self.arcs
    }

    pub fn total_mass(&self) -> f64 {
        self.arcs.iter().map(|a| a.mass).sum::<f64>() + self.atoms.iter().map(|a| a.1).sum::<f64>()
    }
}

/// `(1/2π) ∫_{start}^{start+len} P_z(θ) dθ`, the harmonic measure of the arc
/// seen from `z`.
///
/// With `K = (1+r)/(1-r)` and `t = θ - φ` the kernel integrates to
/// `2 atan(K tan(t/2))`; combining the two endpoints in one `atan2` keeps
/// the result branch-free and accurate for arcs far from `z`.
pub fn harmonic_measure(z: &DiskPoint, start: f64, len: f64) -> f64 {
    if len >= TAU {
        return 1.0;
    }
    if len <= 0.0 {
        return 0.0;
    }
    let r = z.rho();
    let k = (1.0 + r) / z.boundary_distance();
    let t1 = start - z.phi();
    let (s1, c1) = (0.5 * t1).sin_cos();
    let (s2, c2) = (0.5 * (t1 + len)).sin_cos();
    let half = (k * (0.5 * len).sin()).atan2(c1 * c2 + k * k * s1 * s2);
    half / std::f64::consts::PI
}

/// Poisson kernel `(1 - |z|²) / |e^{iθ} - z|²`.
pub fn poisson_kernel(z: &DiskPoint, theta: f64) -> f64 {
    let d = z.boundary_distance();
    let s = (0.5 * (theta - z.phi())).sin();
    d * (1.0 + z.rho()) / (d * d + 4.0 * z.rho() * s * s)
}

/// `∫ P_z dμ`.
pub fn poisson_integral(mu: &CircleMeasure, z: &DiskPoint) -> f64 {
    let arcs: f64 = mu
        .arcs
        .iter()
        .map(|a| a.mass * TAU / a.len * harmonic_measure(z, a.start, a.len))
        .sum();
    let atoms: f64 = mu.atoms.iter().map(|&(t, m)| m * poisson_kernel(z, t)).sum();
    arcs + atoms
}

/// Change of `arg(e^{iθ} - z)` along the arc, unwrapped over two halves.
fn arg_increase(z: Complex64, start: f64, len: f64) -> f64 {
    let mut total = 0.0;
    let mut prev = Complex64::from_polar(1.0, start) - z;
    for k in 1..=2 {
        let next = Complex64::from_polar(1.0, start + len * k as f64 / 2.0) - z;
        let mut d = (next / prev).arg();
        if d <= 0.0 {
            d += TAU;
        }
        total += d;
        prev = next;
    }
    total
}

/// `H(z) = ∫ (e^{iθ} + z)/(e^{iθ} - z) dμ(θ)`, analytic with `Re H` the Poisson
/// integral.
///
/// On an arc, `(w + z)/(w - z) dθ = -dθ - 2i d log(w - z)`, integrated with the
/// logarithm followed continuously along the arc.
pub fn herglotz_transform(mu: &CircleMeasure, z: &DiskPoint) -> Complex64 {
    let zc = z.to_complex();
    let mut h = Complex64::new(0.0, 0.0);
    for a in &mu.arcs {
        let density = a.mass / a.len;
        let darg = arg_increase(zc, a.start, a.len);
        let ln_ratio =
            (Complex64::from_polar(1.0, a.start + a.len) - zc).norm().ln() - (Complex64::from_polar(1.0, a.start) - zc).norm().ln();
        h += density * Complex64::new(2.0 * darg - a.len, -2.0 * ln_ratio);
    }
    for &(t, m) in &mu.atoms {
        let w = Complex64::from_polar(1.0, t);
        h += m * (w + zc) / (w - zc);
    }
    h
}

/// `log B(z)` as `(ln |B|, arg B)`; `ln |B| = -∞` at a zero.
fn blaschke_log(zeros: &[DiskPoint], z: &DiskPoint) -> (f64, f64) {
    let zc = z.to_complex();
    let mut ln_mod = 0.0;
    let mut arg = 0.0;
    for b in zeros {
        if b.rho() == 0.0 {
            ln_mod += z.rho().ln();
            arg += z.phi();
            continue;
        }
        let d = gleason_distance(b, z);
        if d == 0.0 {
            return (f64::NEG_INFINITY, 0.0);
        }
        ln_mod += d.ln();
        let bc = b.to_complex();
        let factor = (bc - zc) / (Complex64::new(1.0, 0.0) - bc.conj() * zc);
        arg += factor.arg() - b.phi();
    }
    (ln_mod, arg)
}

/// `B(z) = Π (|b|/b)(b - z)/(1 - conj(b) z)`, with `z` for zeros at the
/// origin; accumulated in log form.
pub fn blaschke_product(zeros: &[DiskPoint], z: &DiskPoint) -> Complex64 {
    let (ln_mod, arg) = blaschke_log(zeros, z);
    if ln_mod == f64::NEG_INFINITY {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar(ln_mod.exp(), arg)
}

/// `h = C·P[μ]`, and with zeros the bounded function `f = B·exp(-C·H[μ])`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicWitness {
    pub scale: f64,
    pub base: CircleMeasure,
    pub zeros: Vec<DiskPoint>,
}

impl HarmonicWitness {
    pub fn new(scale: f64, base: CircleMeasure, zeros: Vec<DiskPoint>) -> Result<Self> {
        if !(scale.is_finite() && scale >= 0.0) {
            return Err(invalid(format!("scale must be finite and nonnegative, got {scale}")));
        }
        Ok(HarmonicWitness { scale, base, zeros })
    }

    /// `h(z) = C·P[μ](z)`.
    pub fn harmonic(&self, z: &DiskPoint) -> f64 {
        self.scale * poisson_integral(&self.base, z)
    }

    /// `ln |f(z)| = ln |B(z)| - C·P[μ](z)`.
    pub fn log_modulus(&self, z: &DiskPoint) -> f64 {
        blaschke_log(&self.zeros, z).0 - self.harmonic(z)
    }
}

/// `f(z) = B(z)·exp(-C·H(z))`; `|f| <= 1` since `Re H >= 0` and `|B| <= 1`.
pub fn bounded_function(witness: &HarmonicWitness, z: &DiskPoint) -> Complex64 {
    let (ln_b, arg_b) = blaschke_log(&witness.zeros, z);
    if ln_b == f64::NEG_INFINITY {
        return Complex64::new(0.0, 0.0);
    }
    let h = herglotz_transform(&witness.base, z) * witness.scale;
    Complex64::from_polar((ln_b - h.re).exp(), arg_b - h.im)
}

/// Harnack bound `(1 + d)/(1 - d)` on `u(z)/u(w)` for positive harmonic `u`
/// and `d = ρ(z, w)`.
pub fn harnack_factor(d: f64) -> f64 {
    (1.0 + d) / (1.0 - d)
}

/// `(P[μ](z)/P[μ](w), harnack_factor(ρ(z, w)))`.
pub fn harnack_check(mu: &CircleMeasure, z: &DiskPoint, w: &DiskPoint) -> (f64, f64) {
    let ratio = poisson_integral(mu, z) / poisson_integral(mu, w);
    (ratio, harnack_factor(gleason_distance(z, w)))
}
