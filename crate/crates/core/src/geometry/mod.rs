//! Exact 2-D convex geometry: polygons, half-plane clipping, support
//! functions and line-hitting predicates.

mod compact;
mod point;
mod polygon;

pub use compact::{hits, separates, CompactSet, HitInterval};
pub use point::{Direction, HalfPlane, Hyperplane, Point, Side};
pub use polygon::{convex_hull, ConvexPolygon};

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("empty point set")]
    EmptyPointSet,
    #[error("compact set needs at least one non-empty piece")]
    EmptyCompactSet,
    #[error("direction vector has zero length")]
    ZeroDirection,
    #[error("non-finite coordinate")]
    NonFinite,
}

/// Intersection of `poly` with one closed side of `plane`; `None` when empty.
pub fn clip<T: Scalar>(poly: &ConvexPolygon<T>, plane: &Hyperplane<T>, side: Side) -> Option<ConvexPolygon<T>> {
    poly.clip(plane, side)
}

/// Support function `h_K(u)`.
pub fn support<T: Scalar>(k: &CompactSet<T>, u: Direction<T>) -> T {
    k.support(u)
}

pub fn hit_interval<T: Scalar>(k: &CompactSet<T>, u: Direction<T>) -> HitInterval<T> {
    k.hit_interval(u)
}
