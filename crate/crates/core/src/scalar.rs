//! Floating-point scalar abstraction shared by every numeric routine.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar the linear algebra and limit theory are generic over.
///
/// Implemented for `f32` and `f64`. Monte-Carlo code in the harness uses
/// `f64` throughout; `f32` is mainly useful for memory-bound embeddings.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Converts a count into this scalar type.
    #[inline]
    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Default tolerance for "converged to relative residual" checks. For
    /// `f64` this is `1e-11`; narrower types fall back to a multiple of
    /// their machine epsilon.
    #[inline]
    fn residual_tolerance() -> Self {
        let floor = Self::epsilon() * Self::lit(1.0e3);
        let target = Self::lit(1.0e-11);
        if floor > target {
            floor
        } else {
            target
        }
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `|a|` carrying the sign of `b`.
#[inline]
pub(crate) fn copysign<T: Scalar>(a: T, b: T) -> T {
    if b >= T::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}
