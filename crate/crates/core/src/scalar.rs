//! Scalar abstraction shared by the tag model, the elasticity model and the
//! structure network.
//!
//! Everything in the tag embedding and the stress-strain model is rational
//! arithmetic, so it runs on `f32`, `f64` and on exact [`Exact`] ratios. The
//! network needs square roots for interval distances and is bounded by
//! [`Real`] instead.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Exact rational scalar.
pub type Exact = Ratio<i64>;

/// Number type usable by the tag embedding and the elasticity model.
pub trait Scalar:
    Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
    /// Builds `num / den` without passing through a binary float, so exact
    /// scalars stay exact.
    fn ratio(num: u64, den: u64) -> Self {
        Self::from_u64(num).expect("numerator fits scalar")
            / Self::from_u64(den).expect("denominator fits scalar")
    }

    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count fits scalar")
    }

    fn abs_val(self) -> Self {
        if self < Self::zero() {
            Self::zero() - self
        } else {
            self
        }
    }

    fn max_val(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
impl Scalar for Exact {}

/// Scalars with a square root, required by the structure network.
pub trait Real: Scalar + Float {}

impl Real for f32 {}
impl Real for f64 {}
