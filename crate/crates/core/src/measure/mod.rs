//! Finite measurable spaces and the three kinds of measure living on them.

mod atoms;
mod banach;
mod scalar;
mod space;
mod variation;
mod vector;

pub use atoms::AtomSet;
pub use banach::{BanachSpace, Norm};
pub use scalar::{jordan_decompose, mutually_singular, mutually_singular_with, PositiveMeasure, SignedMeasure};
pub use space::{MeasurableSpace, SpaceKind};
pub use variation::{for_each_partition, max_partition_sum, total_variation, total_variation_oracle, ORACLE_LIMIT};
pub use vector::VectorMeasure;

pub(crate) use banach::{add_assign, axpy};

/// Atoms with mass at or below this count as outside the support.
pub const SUPPORT_TOL: f64 = 1e-12;

/// Absolute tolerance for norm and mass comparisons.
pub const NORM_TOL: f64 = 1e-9;
