//! Exact membership-probability algorithms.

pub mod dd;
pub mod facet;
pub mod sweep;

pub use dd::{membership_dd, membership_dd_decomposed, DdDecomposition};
pub use facet::{escaping_facet_test, facet_probability};
pub use sweep::{
    conditional_model, membership_2d, membership_2d_conditioned, membership_decomposed,
    witness_edge_probability, WitnessDecomposition,
};
