use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::levels::LevelSelection;
use crate::error::{invalid, Result};

/// The Cantor-type probability measure at depth `N`: uniform density
/// `2^{l_N}/2π` on `∪_{j ∈ J_N} I_{N,j}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicMeasure {
    pub depth: u32,
    /// `l_0, …, l_N`.
    pub levels: Vec<u32>,
    /// `J_N`, sorted.
    pub support: Vec<u64>,
}

impl DyadicMeasure {
    pub fn new(depth: u32, levels: Vec<u32>, support: Vec<u64>) -> Result<Self> {
        if levels.len() != depth as usize + 1 {
            return Err(invalid(format!("{} level exponents for depth {depth}", levels.len())));
        }
        if depth > 62 {
            return Err(invalid("measure depth too large"));
        }
        if support.windows(2).any(|w| w[1] <= w[0]) || support.last().is_some_and(|&k| k >> depth != 0) {
            return Err(invalid("support must be strictly increasing positions below 2^depth"));
        }
        let m = DyadicMeasure { depth, levels, support };
        let total = m.total_mass();
        if total != 1.0 {
            return Err(invalid(format!("support of size {} with l_N = {} has mass {total}, not 1", m.support.len(), m.l_top())));
        }
        Ok(m)
    }

    fn l_top(&self) -> u32 {
        self.levels[self.depth as usize]
    }

    /// Mass of one depth-`N` arc, `2^{l_N - N}`.
    pub fn atom_mass(&self) -> f64 {
        2f64.powi(self.l_top() as i32 - self.depth as i32)
    }

    pub fn total_mass(&self) -> f64 {
        self.support.len() as f64 * self.atom_mass()
    }

    /// `μ(I_{n,j})`, counted from the depth-`N` support.
    pub fn cylinder_mass(&self, n: u32, j: u64) -> f64 {
        if n > self.depth {
            // inside a depth-N arc the density is uniform
            let shift = n - self.depth;
            let parent = j >> shift;
            let inside = self.support.binary_search(&parent).is_ok();
            return if inside {
                self.atom_mass() * 2f64.powi(-(shift as i32))
            } else {
                0.0
            };
        }
        let shift = self.depth - n;
        let lo = j << shift;
        let hi = (j + 1) << shift;
        let a = self.support.partition_point(|&k| k < lo);
        let b = self.support.partition_point(|&k| k < hi);
        (b - a) as f64 * self.atom_mass()
    }

    /// Maximal runs of consecutive support arcs as `(start angle, end angle, mass)`.
    pub fn runs(&self) -> Vec<(f64, f64, f64)> {
        let width = TAU * 2f64.powi(-(self.depth as i32));
        let mass = self.atom_mass();
        let mut out: Vec<(f64, f64, f64)> = Vec::new();
        let mut i = 0;
        while i < self.support.len() {
            let start = self.support[i];
            let mut end = start;
            while i + 1 < self.support.len() && self.support[i + 1] == end + 1 {
                end += 1;
                i += 1;
            }
            let count = end - start + 1;
            out.push((start as f64 * width, (end + 1) as f64 * width, count as f64 * mass));
            i += 1;
        }
        out
    }
}

/// The measure of a selection at its full depth.
pub fn build_measure(sel: &LevelSelection) -> DyadicMeasure {
    DyadicMeasure {
        depth: sel.depth() as u32,
        levels: sel.l.clone(),
        support: sel.j[sel.depth()].clone(),
    }
}

/// Checks `μ(I_{n,j}) = 2^{l_n - n}` on every selected arc and parent/child
/// additivity; returns the number of violations.
pub fn check_cylinder_masses(sel: &LevelSelection, mu: &DyadicMeasure) -> usize {
    let mut bad = 0;
    for (n, jn) in sel.j.iter().enumerate() {
        let expected = 2f64.powi(sel.l[n] as i32 - n as i32);
        for &k in jn {
            let m = mu.cylinder_mass(n as u32, k);
            if m != expected {
                bad += 1;
            }
            if n < sel.depth() && mu.cylinder_mass(n as u32 + 1, 2 * k) + mu.cylinder_mass(n as u32 + 1, 2 * k + 1) != m {
                bad += 1;
            }
        }
    }
    bad
}
