//! Simulation and verification workbench for planar STIT tessellations.
//!
//! The geometry kernel is generic over the floating-point scalar (see
//! [`scalar::Scalar`]); everything built on top of it works in `f64`
//! through the aliases below.

pub mod capacity;
pub mod error;
pub mod geometry;
pub mod measure;
pub mod mixing;
pub mod rng;
pub mod scalar;
pub mod stit;

pub use error::{Error, Result};
pub use measure::DirectionalMeasure;
pub use stit::{SimulationParams, Tessellation};

pub type Point = geometry::Point<f64>;
pub type Direction = geometry::Direction<f64>;
pub type Hyperplane = geometry::Hyperplane<f64>;
pub type Polygon = geometry::ConvexPolygon<f64>;
pub type CompactSet = geometry::CompactSet<f64>;
pub type HitInterval = geometry::HitInterval<f64>;

pub type PointF32 = geometry::Point<f32>;
pub type PolygonF32 = geometry::ConvexPolygon<f32>;

/// Length tolerance of the `f64` kernel.
pub const GEOM_EPS: f64 = 1e-9;
