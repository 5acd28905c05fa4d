//! Explicit sequences: the Cantor-type family, its necessity variant and
//! ring counterexamples.

mod lemma61;
pub(crate) mod levels;
mod measure;
mod necessity;
mod rings;

pub use lemma61::{
    construct_lemma61, dyadic_point, split_p_b, CantorFamily, CantorPart, Lemma61, Lemma61Checks, SplitResult,
};
pub use levels::{build_level_selection, level_sequence, LevelSelection, SelectionChecks, MAX_DEPTH};
pub use measure::{build_measure, check_cylinder_masses, DyadicMeasure};
pub use necessity::{c_prime, construct_necessity_thm2, Necessity, NecessityChecks, ThickPoint, DEFAULT_THICKENING};
pub use rings::{ring_counterexample, ring_coverage, RingCoverage, RingLevels, RingSequence, MAX_RING_LEVEL};
