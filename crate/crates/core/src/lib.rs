//! Bound states of a particle on the half-line `x <= 0` pressed by a uniform
//! field against a Dirichlet, Neumann or Robin wall, and the position and
//! momentum information measures of those states.
//!
//! Everything is in wall units: lengths in `|Lambda|`, energies in
//! `hbar^2 / (2 m Lambda^2)`, fields in `hbar^2 / (2 e m |Lambda|^3)`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod infomeasures;
pub mod observables;
pub mod oracle;
pub mod quadrature;
pub mod roots;
pub mod special;
pub mod spectrum;
pub mod states;
pub mod sweep;
pub mod units;

pub use error::{Error, Result};
pub use infomeasures::InfoRecord;
pub use observables::{DipoleMatrix, PolarizationRecord};
pub use oracle::GridSpec;
pub use quadrature::ToleranceConfig;
pub use spectrum::{BoundState, BoundarySpec, Regime};
pub use states::{ExtremumInfo, StateFunctions};
pub use sweep::{FieldGrid, Quantity, SweepRequest};
pub use units::UnitScale;
