//! Scalar abstraction for the numerical kernels.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Floating point scalar: `f32` or `f64`.
///
/// Everything the solvers need is `Float` arithmetic plus conversion from
/// `f64` literals. The tolerances quoted throughout the crate assume `f64`.
pub trait Real: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// Lossy conversion from an `f64` literal.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Machine pi.
    fn pi() -> Self {
        Self::of(std::f64::consts::PI)
    }

    /// pi / 2, the azimuthal half-range.
    fn half_pi() -> Self {
        Self::of(std::f64::consts::FRAC_PI_2)
    }
}

impl Real for f32 {}
impl Real for f64 {}
