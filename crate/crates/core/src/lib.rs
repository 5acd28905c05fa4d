//! Nontangential counting of sequences in the unit disk.

pub mod classes;
pub mod construction;
pub mod counting;
pub mod error;
pub mod geometry;
pub mod potential;
pub mod series;

pub use error::{Error, Result};
pub use geometry::{DiskPoint, StolzAperture};
