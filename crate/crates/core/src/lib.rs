//! Numerical toolkit for the variational problem
//! `-Δu + a(x) u = u^(p-1) + ε u^(2*-1)` on `ℝ^N` or an exterior domain.
//!
//! The crate computes radial ground states by shooting, Nehari-manifold
//! projections, the Aubin-Talenti bubble and the best Sobolev constant,
//! exponential interaction asymptotics for multi-bump superpositions, a
//! projected-gradient constrained minimizer, and the two-bump min-max
//! level scan with its barycenter-based certificate.

pub mod error;
pub mod params;
pub mod quad;
pub mod radial;
pub mod nehari;
pub mod potential;
pub mod fields;
pub mod levels;
pub mod interaction;
pub mod solver;
pub mod minmax;
pub mod report;

pub use error::Error;
pub use params::ProblemParams;
pub use radial::{RadialProfile, ShootConfig};
pub use nehari::{NehariProjection, NormBundle};
pub use fields::{BumpField, CutoffSpec, DomainSpec};
pub use potential::PotentialSpec;
pub use report::{Check, EnergyLedger};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
