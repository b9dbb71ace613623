//! Scalar abstraction shared by the model and the integrator.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the dynamics can be evaluated in: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Widening conversion used by the analysis layers.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Maps an angle to `(-π, π]`.
pub fn wrap_angle<S: Scalar>(x: S) -> S {
    let two_pi = S::TAU();
    let mut r = x % two_pi;
    if r > S::PI() {
        r = r - two_pi;
    } else if r <= -S::PI() {
        r = r + two_pi;
    }
    r
}
