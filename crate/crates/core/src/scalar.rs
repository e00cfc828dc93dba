//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point type the estimators are generic over.
///
/// Implemented for `f32` and `f64`. Random variates are always drawn in
/// `f64` and cast, so a seed produces the same stream for either width.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal or computed constant.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar converts to f64")
    }

    /// Count-to-scalar conversion.
    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count is representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}
