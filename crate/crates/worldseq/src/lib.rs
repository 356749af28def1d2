//! Possible-worlds transition systems, utility aggregation over world
//! sequences, property verification by bounded counterexample search, and
//! bounded-horizon planning.
//!
//! The point of the library is the contrast it makes checkable: under a
//! naive net-utility score, deliberately causing harm and then undoing it
//! outranks simply doing no harm, while blame-aware aggregation functions
//! never reward the detour. All scores are exact rationals so that strict
//! inequalities in property verdicts never depend on floating-point noise.

pub mod aggregate;
pub mod cli;
pub mod model;
pub mod plan;
pub mod properties;
pub mod report;
pub mod scalar;
pub mod scenario;

pub use scalar::{Rational, Scalar};
