//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt;

use nalgebra as na;
use num_traits as nt;

/// Real floating point type the library can run on (`f32` or `f64`).
///
/// The tolerance constants are the defaults used when a caller does not
/// override them; they are calibrated to the precision of the type.
pub trait Float:
    Copy + nt::FloatConst + nt::FromPrimitive + nt::ToPrimitive + na::RealField + na::Scalar + fmt::Display + fmt::LowerExp
{
    /// Relative tolerance for structural comparisons.
    const DEFAULT_TOL: Self;
    /// Relative residual accepted for an equivalence certificate.
    const RESIDUAL_TOL: Self;
    /// Pairing tolerance for the `±iv` eigenvalues of `ΩV`.
    const PAIRING_TOL: Self;
    /// Occupations below this are treated as exactly zero in `x log x`.
    const LOG_FLOOR: Self;

    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self {
        <Self as nt::FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    fn as_f64(self) -> f64 {
        <Self as nt::ToPrimitive>::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// `|x|` without the `Signed`/`ComplexField` method ambiguity.
    fn magnitude(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }
}

impl Float for f64 {
    const DEFAULT_TOL: Self = 1e-9;
    const RESIDUAL_TOL: Self = 1e-8;
    const PAIRING_TOL: Self = 1e-8;
    const LOG_FLOOR: Self = 1e-300;
}

impl Float for f32 {
    const DEFAULT_TOL: Self = 1e-4;
    const RESIDUAL_TOL: Self = 1e-3;
    const PAIRING_TOL: Self = 1e-3;
    const LOG_FLOOR: Self = 1e-37;
}

/// `max(1, x)`, the scale factor applied to relative tolerances.
pub(crate) fn unit_floor<T: Float>(x: T) -> T {
    if x > T::one() {
        x
    } else {
        T::one()
    }
}
