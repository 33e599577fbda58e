//! Scalar abstraction for the floating-point kernels.
//!
//! Density evolution, the spectral-shape optimizers, the mean-evolution
//! integrator and the scaling-law formulas are generic over [`Real`].
//! `f64` is the default throughout the crate; `f32` works for the
//! iterative kernels but caps the achievable tolerances at its epsilon.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum<Self>
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`.
    fn from_f64_lossy(x: f64) -> Self;

    /// Complementary error function, evaluated at `f64` precision.
    fn erfc_via_f64(self) -> Self {
        Self::from_f64_lossy(statrs::function::erf::erfc(
            self.to_f64().expect("finite scalar"),
        ))
    }
}

impl Real for f64 {
    #[inline]
    fn from_f64_lossy(x: f64) -> Self {
        x
    }
}

impl Real for f32 {
    #[inline]
    fn from_f64_lossy(x: f64) -> Self {
        x as f32
    }
}

/// Shorthand for converting an `f64` constant into the working scalar.
#[inline]
pub fn real<F: Real>(x: f64) -> F {
    F::from_f64_lossy(x)
}
