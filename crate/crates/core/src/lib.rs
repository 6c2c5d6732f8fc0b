//! Convex-hull computations over uncertain points.
//!
//! Two input models: *unipoint* (each point exists independently with some
//! probability) and *multipoint* (each point is a distribution over several
//! candidate sites, mutually exclusive, total mass at most one). On top of
//! the model the crate offers:
//!
//! - exact membership probabilities in 2D (radial sweep) and in general
//!   dimension (escaping-facet recursion), verified against an exhaustive
//!   outcome-enumeration oracle;
//! - a precomputed probability map over the plane with point location;
//! - a Monte Carlo index with Chernoff-Hoeffding sized sampling;
//! - a Tukey-depth based approximation structure;
//! - beta-hulls via dual beta-levels and envelopes.
//!
//! Geometry is exact rational arithmetic throughout; the optional fast
//! profile uses binary64 for probability accumulation only, never for a
//! sidedness decision.

pub mod error;
pub mod scalar;

pub mod geom;

pub mod model;

pub mod membership;

pub mod probmap;

pub mod mc;

pub mod tukey;

pub mod beta;

pub mod io;

pub mod svg;

pub use error::{Error, Result};
pub use scalar::Rat;
