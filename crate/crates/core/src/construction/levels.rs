use serde::{Deserialize, Serialize};

use crate::classes::DecreaseFunction;
use crate::error::{invalid, Error, Result};

/// Deepest level a construction may enumerate.
pub const MAX_DEPTH: usize = 24;

/// The integers `l_n` and the position sets `J_n` of the dyadic Cantor-type
/// family, for `0 <= n <= depth`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSelection {
    pub l: Vec<u32>,
    /// `J_n`, sorted.
    pub j: Vec<Vec<u64>>,
    /// `g̃(n)` as used to build the selection.
    pub gtilde: Vec<f64>,
    /// Set when `g̃(n) < 1` somewhere, so `l_n = 0` exceeds `log₂ g̃(n)` there.
    pub clamped: bool,
}

/// `ĝ = max(g̃, 1)`, the transform the recursion actually reads.
pub(crate) fn ghat(gt: f64) -> f64 {
    gt.max(1.0)
}

/// `l_n = ⌊min(n, min_{0<=j<=n} (log₂ ĝ(n-j) + j))⌋` for `n <= horizon`,
/// without the position sets. The cap `l_n <= n` keeps `#J_n = 2^{n-l_n}` an
/// integer when `g̃(0) >= 2`.
pub fn level_sequence(gtilde: &[f64]) -> Vec<u32> {
    let mut out = Vec::with_capacity(gtilde.len());
    // the cap enters as one more term, log₂ ĝ(-1) := -1
    let mut m = -1.0f64;
    for &gt in gtilde {
        m = ghat(gt).log2().min(m + 1.0);
        out.push(m.floor() as u32);
    }
    out
}

impl LevelSelection {
    pub fn depth(&self) -> usize {
        self.l.len() - 1
    }

    /// Total number of selected arcs over all levels.
    pub fn total_arcs(&self) -> usize {
        self.j.iter().map(Vec::len).sum()
    }
}

pub(crate) fn check_gtilde(gt: &[f64]) -> Result<()> {
    if let Some(v) = gt.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(invalid(format!("g̃ values must be finite and nonnegative, got {v}")));
    }
    if let Some(i) = gt.windows(2).position(|w| w[1] < w[0]) {
        return Err(invalid(format!("g̃ must be nondecreasing (drops at n = {})", i + 1)));
    }
    Ok(())
}

/// Builds `l_0, …, l_N` and `J_0, …, J_N`: a level with `l_{n+1} = l_n` keeps
/// both children of every selected arc, a jump keeps the even children only.
pub fn build_level_selection(g: &DecreaseFunction, depth: usize) -> Result<LevelSelection> {
    if depth > MAX_DEPTH {
        return Err(Error::TooLarge(format!("depth {depth} exceeds the cap {MAX_DEPTH}")));
    }
    selection_from_values(g.values(depth)?)
}

pub(crate) fn selection_from_values(gtilde: Vec<f64>) -> Result<LevelSelection> {
    check_gtilde(&gtilde)?;
    let l = level_sequence(&gtilde);
    let mut j: Vec<Vec<u64>> = Vec::with_capacity(l.len());
    j.push(vec![0]);
    for n in 1..l.len() {
        let prev = &j[n - 1];
        let next: Vec<u64> = if l[n] == l[n - 1] {
            prev.iter().flat_map(|&k| [2 * k, 2 * k + 1]).collect()
        } else {
            prev.iter().map(|&k| 2 * k).collect()
        };
        j.push(next);
    }
    Ok(LevelSelection {
        clamped: gtilde.iter().any(|&v| v < 1.0),
        l,
        j,
        gtilde,
    })
}

/// Violations of the structural properties of a selection.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SelectionChecks {
    /// `l_{n+1} - l_n ∉ {0, 1}`.
    pub step: Vec<usize>,
    /// `l_n > log₂ ĝ(n)`.
    pub bound: Vec<usize>,
    /// Levels where `l_n + 1` would still satisfy every constraint.
    pub maximality: Vec<usize>,
    /// `#J_n != 2^{n - l_n}`.
    pub level_length: Vec<usize>,
    /// `J_{n+1}` not inside the children of `J_n`, or not the even ones on a jump.
    pub nesting: Vec<usize>,
    /// Levels where `g̃(n) < 1` forced the clamp.
    pub clamped_levels: Vec<usize>,
}

impl SelectionChecks {
    pub fn violations(&self) -> usize {
        self.step.len() + self.bound.len() + self.maximality.len() + self.level_length.len() + self.nesting.len()
    }
}

impl LevelSelection {
    pub fn check(&self) -> SelectionChecks {
        let mut c = SelectionChecks::default();
        let n_max = self.depth();
        for n in 0..=n_max {
            let l = self.l[n];
            let lg = ghat(self.gtilde[n]).log2();
            if self.gtilde[n] < 1.0 {
                c.clamped_levels.push(n);
            }
            if n < n_max && !(self.l[n + 1] == l || self.l[n + 1] == l + 1) {
                c.step.push(n);
            }
            if l as f64 > lg {
                c.bound.push(n);
            }
            // raising l_n by one must break the bound, the cap or a step constraint
            let up = l + 1;
            let bound_ok = up as f64 <= lg && up as usize <= n;
            let left_ok = n == 0 || up <= self.l[n - 1] + 1;
            let right_ok = n == n_max || up <= self.l[n + 1];
            if bound_ok && left_ok && right_ok {
                c.maximality.push(n);
            }
            let expected = 1u64 << (n as u32 - l.min(n as u32));
            if l as usize > n || self.j[n].len() as u64 != expected {
                c.level_length.push(n);
            }
            if n < n_max {
                let jump = self.l[n + 1] == l + 1;
                let ok = self.j[n + 1].iter().all(|&k| {
                    let parent = k / 2;
                    self.j[n].binary_search(&parent).is_ok() && (!jump || k % 2 == 0)
                });
                if !ok {
                    c.nesting.push(n);
                }
            }
        }
        c
    }
}
