//! Certified bounds for the natural pseudometric on fundamental groups of
//! compact metric spaces.
//!
//! The pseudometric `rho(a, b)` between two homotopy classes is the infimum of
//! the uniform distance `mu` over all pairs of representative loops. It is not
//! computable exactly in general; this crate instead produces certified
//! two-sided bounds with machine-checkable witnesses:
//!
//! - upper bounds come from explicit representative pairs whose uniform
//!   distance is bracketed on a finite sample grid,
//! - lower bounds come from geodesic-uniqueness margins (half the systole) and
//!   from Lipschitz projections of inverse systems.
//!
//! Spaces are finite metric simplicial complexes with exact rational path
//! metrics, two closed-form analytic models (punctured plane and cylinder),
//! and truncated inverse limits of complexes with retraction bonding maps.
//! The [`harness`] module runs scenario-level comparisons of the pseudometric
//! topology against the shape topology (via nerves of covers and level
//! projections) and the Spanier topology.

pub mod cover;
pub mod error;
pub mod group;
pub mod harness;
pub mod limitsys;
pub mod loops;
pub mod report;
pub mod rho;
pub mod scalar;
pub mod space;

pub use error::{Error, Result};
pub use scalar::Scalar;
