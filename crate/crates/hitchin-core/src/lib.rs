//! Desk-scale computational toolkit for Higgs bundles and their friends:
//! exact linear algebra over Gaussian rationals, dimension formulas, Hitchin
//! map and section, spectral curve diagnostics with numeric monodromy, wild
//! Stokes combinatorics at irregular poles, parabolic stability, star-quiver
//! and hyperpolygon moment maps, and real-form fixed-point calculators.
//!
//! Everything that can be exact is exact; floating point only enters through
//! clearly marked numeric oracles (root finding, loop continuation, the
//! moment-map solver), each with an explicit residual contract.

pub mod error;
pub mod exact;
pub mod exec;
pub mod formulas;
pub mod higgs;
pub mod spectral;
pub mod parabolic;
pub mod wild;
pub mod quiver;
pub mod branes;

pub use error::{Error, Result};
pub use exact::{ExactComplex, Poly, CMatrix, PolyMatrix, Rational};
