//! Exact machinery for equality-pattern ("smells") and unanimous Bell scenarios.
//!
//! In a smells scenario the parties cannot read their outcomes off as numbers;
//! per round they only learn which parties' outcomes coincide, i.e. a set
//! partition of the parties. Behaviors reduce to probability vectors indexed by
//! (input tuple, partition), local vertices become 0/1 vectors, and the local
//! polytope becomes small enough to attack exactly. This crate provides:
//!
//! * set-partition combinatorics (Bell and Stirling numbers, restricted-growth
//!   strings) — [`partitions`],
//! * scenarios, deterministic strategies, vertex generation and the closed-form
//!   vertex counts — [`strategies`],
//! * exact rational polyhedral computation: double description, facet and
//!   vertex enumeration, affine hulls, linear programming — [`geometry`],
//! * symmetry groups on inequalities, canonical forms and facet classes —
//!   [`symmetry`],
//! * local / signaling / no-signaling / bilocal-NS bounds — [`bounds`],
//! * unanimous inequality ↔ nonlocal game transforms — [`games`],
//! * the built-in catalog of named inequalities — [`catalog`].
//!
//! Everything in this crate is exact: big integers and big rationals, no
//! floating point. Heuristic quantum lower bounds live in the companion
//! `smells-quantum` crate.

pub mod bounds;
pub mod caps;
pub mod catalog;
pub mod games;
pub mod geometry;
pub mod partitions;
pub mod strategies;
pub mod symmetry;

/// Exact scalar used throughout the geometry: arbitrary-precision rational.
pub type Rat = num_rational::BigRational;
/// Arbitrary-precision signed integer.
pub type Int = num_bigint::BigInt;
/// Arbitrary-precision counter for combinatorial quantities.
pub type Count = num_bigint::BigUint;

pub use caps::ResourceCaps;
pub use geometry::ineq::InequalityFunctional;
pub use partitions::SetPartition;
pub use strategies::{Mode, Scenario};

/// Convenience: rational from an integer.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

/// Convenience: rational from numerator and denominator.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}
