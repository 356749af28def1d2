//! Scalar abstraction for utility values.
//!
//! Aggregation arithmetic is written against [`Scalar`] so it can run on any
//! numeric type, but property verdicts rely on exact comparisons, so the
//! crate-level default is the exact rational alias [`Rational`].

use std::fmt;

use num_traits::{FromPrimitive, Num, Signed};

/// Numeric requirements for utility values and aggregated scores.
pub trait Scalar:
    Num + Signed + FromPrimitive + PartialOrd + Clone + fmt::Debug + fmt::Display
{
}

impl<T> Scalar for T where
    T: Num + Signed + FromPrimitive + PartialOrd + Clone + fmt::Debug + fmt::Display
{
}

/// Exact rational scalar used throughout the CLI and the property search.
pub type Rational = num_rational::Ratio<i64>;

/// Shorthand for constructing a reduced rational.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(numer, denom)
}
