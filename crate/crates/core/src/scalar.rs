//! Numeric abstractions.
//!
//! Probability algebra (enumeration oracles, transition rows, drift, the
//! steady-state closed form) only needs field operations and is written
//! against [`Scalar`], so it runs on `f32`, `f64` and exact rationals alike.
//! Anything that takes logarithms or searches for roots needs [`Real`].

use std::fmt::Debug;
use std::iter::Sum;

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, Num};

/// A field-like scalar: `f32`, `f64`, or an exact rational.
pub trait Scalar: Copy + Num + PartialOrd + FromPrimitive + Debug + Sum + 'static {
    /// Lossless for the small counts used here (user and class indices).
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// Possibly lossy conversion of a literal.
    fn of_f64(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn abs_of(self) -> Self {
        if self < Self::zero() {
            Self::zero() - self
        } else {
            self
        }
    }

    fn is_probability(self) -> bool {
        self >= Self::zero() && self <= Self::one()
    }
}

/// Floating point scalar: `f32` or `f64`.
pub trait Real: Scalar + Float {}

impl Scalar for f32 {}
impl Scalar for f64 {}
impl Real for f32 {}
impl Real for f64 {}

impl Scalar for Ratio<i64> {}
impl Scalar for Ratio<i128> {}
