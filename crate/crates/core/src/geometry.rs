//! Pseudo-hyperbolic geometry of the unit disk, Stolz angles, and the dyadic
//! partition of the disk into annular cubes `Q_{n,k}`.
//!
//! A Stolz angle of aperture `alpha` with vertex `e^{iθ}` is the region
//! `|1 - z e^{-iθ}| < (1 + alpha)(1 - |z|)`. Flipping the roles of point and
//! vertex, every point `z` sees the open arc `I_z` of vertices whose Stolz
//! angle contains it; that arc is the basic object of the counting module.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Reduce an angle to `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Unsigned distance between two angles measured along the circle, in `[0, π]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// A point of the open unit disk in polar form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint {
    rho: f64,
    phi: f64,
}

impl DiskPoint {
    pub const ORIGIN: DiskPoint = DiskPoint { rho: 0.0, phi: 0.0 };

    /// Builds a point from modulus and argument; the argument is reduced to `[0, 2π)`.
    pub fn new(rho: f64, phi: f64) -> Result<Self> {
        if !(rho.is_finite() && (0.0..1.0).contains(&rho)) {
            return Err(Error::OutsideDisk { rho });
        }
        if !phi.is_finite() {
            return Err(invalid(format!("non-finite argument {phi}")));
        }
        Ok(DiskPoint {
            rho,
            phi: normalize_angle(phi),
        })
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        let rho = z.norm();
        let phi = if rho == 0.0 { 0.0 } else { z.arg() };
        Self::new(rho, phi)
    }

    #[inline]
    pub fn rho(&self) -> f64 {
        self.rho
    }

    #[inline]
    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `1 - |z|`, exact whenever `rho` is.
    #[inline]
    pub fn boundary_distance(&self) -> f64 {
        1.0 - self.rho
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.rho, self.phi)
    }

    /// The same point rotated by `angle` about the origin.
    pub fn rotated(&self, angle: f64) -> DiskPoint {
        DiskPoint {
            rho: self.rho,
            phi: normalize_angle(self.phi + angle),
        }
    }

    /// Dyadic level `n` with `1 - 2^{-n} <= rho < 1 - 2^{-n-1}`, i.e.
    /// `floor(log2(1 / (1 - rho)))`.
    pub fn level(&self) -> u32 {
        dyadic_level(self.rho)
    }
}

/// Aperture `alpha > 0` of a Stolz angle.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct StolzAperture(f64);

impl StolzAperture {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 {
            Ok(StolzAperture(alpha))
        } else {
            Err(Error::InvalidAperture(alpha))
        }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Aperture used when nothing else is specified. It exceeds
/// [`MIN_COVERING_APERTURE`], so every dyadic point `p_{n,j}` sees the whole
/// arc `I_{n,j}` and every full dyadic ring covers the circle.
pub const DEFAULT_ALPHA: f64 = 3.0;

/// Smallest aperture with `alpha (2 + alpha) >= π²`. Above it the Stolz arc of
/// a point at radius `1 - 2^{-n}` is wider than the dyadic arc `I_{n,j}`.
pub const MIN_COVERING_APERTURE: f64 = 2.296_908_309_475_615;

impl Default for StolzAperture {
    fn default() -> Self {
        StolzAperture(DEFAULT_ALPHA)
    }
}

/// Pseudo-hyperbolic (Gleason) distance `|z - w| / |1 - conj(w) z|`.
pub fn gleason_distance(z: &DiskPoint, w: &DiskPoint) -> f64 {
    let (a, b) = (z.to_complex(), w.to_complex());
    let den = (Complex64::new(1.0, 0.0) - b.conj() * a).norm();
    (a - b).norm() / den
}

/// Whether `z` lies in the (open) Stolz angle with vertex `e^{iθ}`.
pub fn stolz_contains(z: &DiskPoint, theta: f64, alpha: StolzAperture) -> bool {
    let lhs = (Complex64::new(1.0, 0.0) - z.to_complex() * Complex64::from_polar(1.0, -theta)).norm();
    lhs < (1.0 + alpha.value()) * (1.0 - z.rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArcKind {
    Empty,
    Proper,
    FullCircle,
}

/// An open arc of the unit circle given by its center and half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleArc {
    pub center: f64,
    pub half_width: f64,
    pub kind: ArcKind,
}

impl CircleArc {
    pub fn new(center: f64, half_width: f64) -> Self {
        let kind = if half_width <= 0.0 {
            ArcKind::Empty
        } else if half_width >= PI {
            ArcKind::FullCircle
        } else {
            ArcKind::Proper
        };
        CircleArc {
            center: normalize_angle(center),
            half_width: half_width.clamp(0.0, PI),
            kind,
        }
    }

    pub fn length(&self) -> f64 {
        2.0 * self.half_width
    }

    pub fn contains(&self, theta: f64) -> bool {
        match self.kind {
            ArcKind::Empty => false,
            ArcKind::FullCircle => true,
            ArcKind::Proper => circular_distance(theta, self.center) < self.half_width,
        }
    }

    /// Start angle in `[0, 2π)`; the arc runs counterclockwise for `length()`.
    pub fn start(&self) -> f64 {
        normalize_angle(self.center - self.half_width)
    }
}

/// Half-width of the Stolz arc `I_z` for a point of modulus `rho`.
///
/// Equivalent to `arccos(c)` with `c = (1 + ρ² - (1+α)²(1-ρ)²) / (2ρ)`, written
/// through `1 - c = α(2+α)(1-ρ)² / (2ρ)` so that it stays accurate as `ρ → 1`.
pub fn stolz_half_width(rho: f64, alpha: StolzAperture) -> f64 {
    if rho <= 0.0 {
        return PI;
    }
    let a = alpha.value();
    let s = (1.0 - rho) * (a * (2.0 + a) / rho).sqrt() / 2.0;
    if s >= 1.0 {
        PI
    } else {
        2.0 * s.asin()
    }
}

/// The arc `I_z = {θ : z ∈ Γ_α(e^{iθ})}`.
pub fn stolz_arc(z: &DiskPoint, alpha: StolzAperture) -> CircleArc {
    CircleArc::new(z.phi, stolz_half_width(z.rho, alpha))
}

/// Position `(n, k)` of a dyadic arc `I_{n,k}` / cube `Q_{n,k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicIndex {
    pub n: u32,
    pub k: u64,
}

impl DyadicIndex {
    pub fn new(n: u32, k: u64) -> Result<Self> {
        if n > 62 || k >= 1u64 << n {
            return Err(invalid(format!("dyadic index ({n}, {k}) out of range")));
        }
        Ok(DyadicIndex { n, k })
    }

    /// Radial bounds `[1 - 2^{-n}, 1 - 2^{-n-1})` of the cube.
    pub fn radial_bounds(&self) -> (f64, f64) {
        (1.0 - pow2(-(self.n as i32)), 1.0 - pow2(-(self.n as i32) - 1))
    }

    /// Angular bounds `[2πk 2^{-n}, 2π(k+1) 2^{-n})` of the arc.
    pub fn angular_bounds(&self) -> (f64, f64) {
        let w = TAU * pow2(-(self.n as i32));
        (w * self.k as f64, w * (self.k + 1) as f64)
    }

    /// Whether `z` satisfies the cube's defining inequalities.
    pub fn contains(&self, z: &DiskPoint) -> bool {
        let (r0, r1) = self.radial_bounds();
        let (t0, t1) = self.angular_bounds();
        r0 <= z.rho && z.rho < r1 && t0 <= z.phi && z.phi < t1
    }

    /// Center point of `Q`'s inner edge, `(1 - 2^{-n}) e^{iπ(2k+1)2^{-n}}`.
    pub fn anchor_point(&self) -> DiskPoint {
        let (t0, t1) = self.angular_bounds();
        DiskPoint {
            rho: self.radial_bounds().0,
            phi: normalize_angle(0.5 * (t0 + t1)),
        }
    }
}

#[inline]
pub(crate) fn pow2(e: i32) -> f64 {
    2f64.powi(e)
}

pub(crate) fn dyadic_level(rho: f64) -> u32 {
    if rho < 0.5 {
        return 0;
    }
    let mut n = (-(1.0 - rho).log2()).floor().max(0.0) as i32;
    while n > 0 && 1.0 - pow2(-n) > rho {
        n -= 1;
    }
    while 1.0 - pow2(-n - 1) <= rho {
        n += 1;
    }
    n as u32
}

/// The dyadic cube containing `z`.
pub fn dyadic_index_of(z: &DiskPoint) -> DyadicIndex {
    let n = dyadic_level(z.rho);
    let cells = 1u64 << n;
    let k = ((z.phi / TAU) * cells as f64).floor() as u64;
    DyadicIndex {
        n,
        k: k.min(cells - 1),
    }
}

/// Supremum of the Gleason distance between two points of the closure of a
/// level-`n` cube, found by sampling the cube's boundary (corners included).
/// The Gleason distance to a fixed point is the modulus of a holomorphic
/// function, so the diameter is attained on the boundary.
pub fn cube_diameter(n: u32) -> f64 {
    const SAMPLES: usize = 48;
    let boundary: Vec<DiskPoint> = if n == 0 {
        (0..4 * SAMPLES)
            .map(|i| DiskPoint {
                rho: 0.5 - f64::EPSILON,
                phi: TAU * i as f64 / (4 * SAMPLES) as f64,
            })
            .collect()
    } else {
        let idx = DyadicIndex { n, k: 0 };
        let (r0, r1) = idx.radial_bounds();
        let (t0, t1) = idx.angular_bounds();
        let r1 = r1 - (r1 - r0) * 1e-12;
        let mut pts = Vec::with_capacity(4 * SAMPLES);
        for i in 0..SAMPLES {
            let s = i as f64 / (SAMPLES - 1) as f64;
            let r = r0 + s * (r1 - r0);
            let t = t0 + s * (t1 - t0);
            pts.push(DiskPoint { rho: r, phi: t0 });
            pts.push(DiskPoint { rho: r, phi: t1 });
            pts.push(DiskPoint { rho: r0, phi: t });
            pts.push(DiskPoint { rho: r1, phi: t });
        }
        pts
    };
    let mut best: f64 = 0.0;
    for (i, a) in boundary.iter().enumerate() {
        for b in &boundary[i + 1..] {
            best = best.max(gleason_distance(a, b));
        }
    }
    best
}

/// Global cube diameter bound `δ₀ = max_{n <= max_level} diam(Q_n)`.
pub fn delta0(max_level: u32) -> f64 {
    (0..=max_level).map(cube_diameter).fold(0.0, f64::max)
}

/// Levels scanned by [`delta0`] when callers do not choose; the diameters have
/// converged to double precision well before this depth.
pub const DELTA0_LEVELS: u32 = 24;

/// Separation constant and dyadic-cube occupancy of a finite sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    /// Infimum of pairwise Gleason distances.
    pub delta: f64,
    pub separated: bool,
    /// Largest number of points observed in one dyadic cube.
    pub max_per_cube: usize,
}

/// Separation constant of `a` plus the observed points-per-cube bound.
pub fn separation_constant(a: &[DiskPoint]) -> Result<SeparationReport> {
    if a.len() < 2 {
        return Err(invalid("separation needs at least two points"));
    }
    let delta = min_pairwise_distance(a);
    let mut tally: HashMap<DyadicIndex, usize> = HashMap::new();
    for z in a {
        *tally.entry(dyadic_index_of(z)).or_default() += 1;
    }
    Ok(SeparationReport {
        delta,
        separated: delta > 0.0,
        max_per_cube: tally.values().copied().max().unwrap_or(0),
    })
}

fn brute_force_min(a: &[DiskPoint]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, z) in a.iter().enumerate() {
        for w in &a[i + 1..] {
            best = best.min(gleason_distance(z, w));
        }
    }
    best
}

/// Exact minimum pairwise Gleason distance.
///
/// Uses `d² = |z-w|² / (|z-w|² + (1-|z|²)(1-|w|²))`: a pair closer than `t`
/// has `|z - w| < sqrt(t²/(1-t²)) (1 - |z|²)` when `|z| <= |w|`, and
/// `|z - w| >= |z| |e^{iφ_z} - e^{iφ_w}|`, which bounds the angular window
/// that has to be scanned around each point.
pub fn min_pairwise_distance(a: &[DiskPoint]) -> f64 {
    let n = a.len();
    if n <= 2048 {
        return brute_force_min(a);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i].phi.total_cmp(&a[j].phi));
    let mut pos = vec![0usize; n];
    for (p, &i) in order.iter().enumerate() {
        pos[i] = p;
    }
    let mut best = f64::INFINITY;
    for p in 0..n {
        best = best.min(gleason_distance(&a[order[p]], &a[order[(p + 1) % n]]));
    }
    let mut by_rho = order.clone();
    by_rho.sort_by(|&i, &j| a[i].rho.total_cmp(&a[j].rho));
    for w in by_rho.windows(2) {
        best = best.min(gleason_distance(&a[w[0]], &a[w[1]]));
    }
    if best == 0.0 {
        return 0.0;
    }
    if best > 0.999 {
        return brute_force_min(a);
    }
    let scale = (best * best / (1.0 - best * best)).sqrt();
    for i in 0..n {
        let z = &a[i];
        let reach = scale * (1.0 - z.rho * z.rho);
        let chord = if z.rho > 0.0 { reach / z.rho } else { f64::INFINITY };
        let outer = |j: usize| a[j].rho > z.rho || (a[j].rho == z.rho && j > i);
        if chord >= 2.0 {
            for (j, w) in a.iter().enumerate() {
                if j != i && outer(j) {
                    best = best.min(gleason_distance(z, w));
                }
            }
            continue;
        }
        let window = 2.0 * (chord / 2.0).asin();
        for step in 1..n {
            let j = order[(pos[i] + step) % n];
            if (a[j].phi - z.phi).rem_euclid(TAU) > window {
                break;
            }
            if outer(j) {
                best = best.min(gleason_distance(z, &a[j]));
            }
        }
        for step in 1..n {
            let j = order[(pos[i] + n - step) % n];
            if (z.phi - a[j].phi).rem_euclid(TAU) > window {
                break;
            }
            if outer(j) {
                best = best.min(gleason_distance(z, &a[j]));
            }
        }
    }
    best
}

/// Least `M₁` such that `Γ_α(e^{iθ})` is covered by the cubes within `M₁`
/// positions of the cubes met by the radius at `θ`.
///
/// A point of shell `n` in `Γ_α(e^{iθ})` is within the Stolz half-width of
/// `θ`, which is largest at the inner radius `1 - 2^{-n}`; an angular offset
/// below `H` moves at most `ceil(H / w)` cubes of width `w = 2π 2^{-n}`.
pub fn neighbor_cover_width(alpha: StolzAperture) -> u64 {
    let mut m1 = 0u64;
    for n in 1..=53i32 {
        let rho = 1.0 - pow2(-n);
        let h = stolz_half_width(rho, alpha);
        let cells = pow2(n);
        let needed = (h * cells / TAU).ceil() as u64;
        let whole_ring = ((cells - 1.0) / 2.0).ceil() as u64;
        m1 = m1.max(needed.min(whole_ring));
    }
    m1
}

/// `count` points at Gleason distance `radius` from `center`, equally spaced
/// on the hyperbolic circle (images of `radius·e^{2πik/count}` under the disk
/// automorphism sending 0 to `center`).
pub fn hyperbolic_circle(center: &DiskPoint, radius: f64, count: usize) -> Result<Vec<DiskPoint>> {
    if !(0.0..1.0).contains(&radius) {
        return Err(invalid(format!("hyperbolic radius {radius} not in [0, 1)")));
    }
    let c = center.to_complex();
    (0..count)
        .map(|k| {
            let u = Complex64::from_polar(radius, TAU * k as f64 / count as f64);
            DiskPoint::from_complex((c + u) / (Complex64::new(1.0, 0.0) + c.conj() * u))
        })
        .collect()
}
