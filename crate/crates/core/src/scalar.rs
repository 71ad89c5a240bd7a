//! Field abstraction shared by the moment machinery.
//!
//! The default path runs in `f64`. With the `exact` feature the same code runs
//! over arbitrary-precision rationals, which is what the small-population
//! enumeration tests use to certify the moment-transfer construction exactly.

use core::fmt::Debug;
use core::ops::Neg;

use num_traits::Num;

pub trait Scalar: Clone + Debug + PartialEq + Num + Neg<Output = Self> {
    /// Exact conversion where the representation allows it.
    fn from_f64(x: f64) -> Self;

    fn from_u64(x: u64) -> Self;

    fn to_f64(&self) -> f64;

    /// Pivot selection key for elimination.
    fn magnitude(&self) -> f64;

    /// Whether a pivot should be treated as zero relative to `scale`.
    fn is_negligible(&self, scale: f64) -> bool;
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }

    fn from_u64(x: u64) -> Self {
        x as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn magnitude(&self) -> f64 {
        libm::fabs(*self)
    }

    fn is_negligible(&self, scale: f64) -> bool {
        libm::fabs(*self) <= 1e-14 * scale
    }
}

#[cfg(feature = "exact")]
pub use exact::Rational;

#[cfg(feature = "exact")]
mod exact {
    use super::Scalar;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{ToPrimitive, Zero};

    pub type Rational = BigRational;

    impl Scalar for BigRational {
        fn from_f64(x: f64) -> Self {
            BigRational::from_float(x).expect("finite probability")
        }

        fn from_u64(x: u64) -> Self {
            BigRational::from_integer(BigInt::from(x))
        }

        fn to_f64(&self) -> f64 {
            ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
        }

        fn magnitude(&self) -> f64 {
            libm::fabs(Scalar::to_f64(self))
        }

        fn is_negligible(&self, _scale: f64) -> bool {
            self.is_zero()
        }
    }
}
