//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt;
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real floating-point type the library is generic over (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Default
    + fmt::Debug
    + fmt::Display
    + fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Absolute tolerance used when the caller does not supply one.
    const DEFAULT_TOL: f64;

    /// Converts an `f64` literal; every literal used in the crate is representable.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn default_tol() -> Self {
        Self::lit(Self::DEFAULT_TOL)
    }
}

impl Real for f32 {
    const DEFAULT_TOL: f64 = 1e-4;
}

impl Real for f64 {
    const DEFAULT_TOL: f64 = 1e-9;
}

/// Shorthand for building a complex scalar from `f64` parts.
pub fn cplx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

pub(crate) fn real<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}
