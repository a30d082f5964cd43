//! Scaled-integer arithmetic for the exact search loops.
//!
//! Searches that only add, compare and divide by known factors run on integers
//! after scaling by a common denominator. `i128` is used when the inputs leave
//! enough headroom, big integers otherwise.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

/// Bits kept free above the largest input sum before falling back to big integers.
pub(crate) const I128_HEADROOM_BITS: u64 = 120;

pub(crate) trait ScaledInt: Clone + Ord + Eq + Send + Sync {
    fn zero() -> Self;
    fn plus(&self, other: &Self) -> Self;
    /// Division that must be exact; checked in debug builds.
    fn div_exact(&self, d: &Self) -> Self;
    fn from_big(v: &BigInt) -> Self;
    fn to_big(&self) -> BigInt;
}

impl ScaledInt for i128 {
    fn zero() -> Self {
        0
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn div_exact(&self, d: &Self) -> Self {
        debug_assert_eq!(self % d, 0);
        self / d
    }
    fn from_big(v: &BigInt) -> Self {
        v.to_i128().expect("value fits i128")
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl ScaledInt for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn div_exact(&self, d: &Self) -> Self {
        let (q, r) = self.div_rem(d);
        debug_assert!(r.is_zero());
        q
    }
    fn from_big(v: &BigInt) -> Self {
        v.clone()
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// Whether values bounded by `total` can run on `i128`.
pub(crate) fn fits_i128(total: &BigInt) -> bool {
    total.bits() < I128_HEADROOM_BITS
}
