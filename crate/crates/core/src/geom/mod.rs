//! Exact geometric primitives: predicates, hulls, halfplanes, duality.

pub mod direction;
pub mod dual;
pub mod halfplane;
pub mod point;
pub mod polygon;
pub mod predicates;
pub mod simplex;

pub use direction::Dir;
pub use dual::DualLine;
pub use halfplane::{halfplane_intersection, Halfplane};
pub use point::Point;
pub use polygon::{convex_hull_2d, point_in_hull_2d, ConvexRegion, Location};
pub use predicates::{orient2d, orient_d};
pub use simplex::{general_position_check, point_in_hull, require_general_position};
