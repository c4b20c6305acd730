//! Left-invariant sub-Riemannian structures on three-dimensional Lie groups.
//!
//! The crate is organised bottom-up:
//!
//! * [`algebra`]: structure constants of a 3D real Lie algebra, brackets,
//!   Jacobi residuals, the Killing form and coarse algebra identification.
//! * [`frame`]: a distribution with an inner product on it, its orthonormal
//!   frame, the Reeb field and the six frame structure constants.
//! * [`invariants`]: the metric invariants `chi` and `kappa`, dilation
//!   normalisation and the canonical frame for `chi > 0`.
//! * [`classify`]: the decision procedure assigning a local isometry class,
//!   and the built-in catalog of normalised structures.
//! * [`geodesics`]: normal geodesics on matrix (and quaternion) models and a
//!   shooting estimate of the Carnot-Caratheodory distance.
//! * [`isometry`]: the explicit isometry between `A+(R) x S^1` and `SL(2)`
//!   together with a numerical certification harness.
//!
//! All quantities are `f64`. Every type is immutable after construction and
//! every operation is a pure function, so values can be shared freely across
//! threads.

pub mod algebra;
pub mod check;
pub mod classify;
mod error;
pub mod frame;
pub mod geodesics;
pub mod invariants;
pub mod isometry;
#[doc(hidden)]
pub mod mutation;
pub mod numeric;

pub use algebra::{AlgebraLabel, LieAlgebra3, Vector3};
pub use classify::{catalog, classify, CatalogEntry, ClassCase, ClassLabel, StructureLabel};
pub use error::{Error, Result};
pub use frame::{AdaptedFrame, FrameConstants, SRStructure};
pub use invariants::Invariants;

/// Default relative tolerance for all "is this zero?" decisions.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Relative tolerance used by zero tests in the classification pipeline.
///
/// A quantity `x` is treated as zero when `|x| <= rel * scale`, where the
/// scale is chosen by the caller (usually `1 + max |structure constant|`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
}

impl Tolerance {
    pub fn new(rel: f64) -> Self {
        Self { rel }
    }

    #[inline]
    pub fn is_zero(&self, x: f64, scale: f64) -> bool {
        x.abs() <= self.rel * scale
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel: DEFAULT_TOLERANCE,
        }
    }
}
