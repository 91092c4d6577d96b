use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the matrix layer is generic over: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` constant or tolerance.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every Real")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Real is representable as f64")
    }

    /// `1/√6`, the entry modulus of an order-6 Hadamard matrix in unitary normalization.
    #[inline]
    fn inv_sqrt6() -> Self {
        Self::one() / Self::of(6.0).sqrt()
    }

    #[inline]
    fn sqrt6() -> Self {
        Self::of(6.0).sqrt()
    }
}

impl Real for f32 {}
impl Real for f64 {}
