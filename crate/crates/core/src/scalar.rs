use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point scalar the pipeline is generic over: `f32` or `f64`.
///
/// `Display` must print the shortest representation that parses back to the
/// same value; the model file relies on it for bit-exact round trips.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + FromStr
    + Debug
    + Display
    + Default
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` constant.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant representable in scalar")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip<T: Scalar>(v: T) -> T {
        v.to_string().parse::<T>().ok().unwrap()
    }

    #[test]
    fn display_roundtrips_bit_exact() {
        for v in [0.1f64, 1.0 / 3.0, -2.5e-17, 97.25, f64::MAX] {
            assert_eq!(roundtrip(v).to_bits(), v.to_bits());
        }
        for v in [0.1f32, 1.0 / 3.0, 113.0] {
            assert_eq!(roundtrip(v).to_bits(), v.to_bits());
        }
    }
}
