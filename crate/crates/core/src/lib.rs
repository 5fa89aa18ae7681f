//! Exact computations for finite bundle random dynamical systems: minimal
//! subcover counts, relative tail entropy, conditional and relative
//! measure-theoretic entropy, and invariant-measure constructions.
//!
//! Systems are finite: a driving system `(Ω, P, ϑ)` with rational
//! probabilities, fibers `E_ω` of opaque points and maps `T_ω: E_ω → E_ϑω`.
//! Counts and masses are exact; only logarithms are floating point.

pub mod budget;
pub mod cli;
pub mod counting;
pub mod covers;
pub mod error;
pub mod fixtures;
pub mod invariant;
pub mod measures;
pub mod model;
pub mod pointset;
pub mod rational;
pub mod scenario;
pub mod symbolic;
pub mod tail_entropy;
pub mod verify;

pub use budget::Budget;
pub use error::{Error, Result};
pub use model::{
    induced_pair_map, pair_system, product_system, validate_system, BundleRds, DrivingSystem,
    FactorMap, MetricSpace, PairSystem, ProductSystem, ValidationReport, Violation,
};
pub use pointset::PointSet;
pub use rational::Rational;
