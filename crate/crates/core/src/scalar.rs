//! Floating-point scalar abstraction for the geometry kernel.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Gathers the traits the geometry kernel needs from a floating-point type.
pub trait Scalar: Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Length tolerance used for vertex classification and touch predicates.
    fn geom_eps() -> Self;

    /// Converts an `f64` literal. Every supported scalar can represent the
    /// literals used in this crate, so conversion never fails.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    #[inline]
    fn geom_eps() -> f64 {
        1e-9
    }
}

impl Scalar for f32 {
    // f32 has ~7 significant digits; 1e-4 keeps clipping stable for
    // windows up to O(10^2) units.
    #[inline]
    fn geom_eps() -> f32 {
        1e-4
    }
}
