//! Exact arithmetic kernel: Gaussian rationals, dense univariate polynomials,
//! constant and polynomial matrices, and the numeric root-finding oracle used
//! by the monodromy and correspondence checks.

mod complex;
mod poly;
mod cmatrix;
mod pmatrix;
pub mod numeric;

pub use complex::{
    deserialize_rational, deserialize_rational_vec, rational_to_f64, serialize_rational,
    serialize_rational_vec, ExactComplex, Rational,
};
pub use poly::Poly;
pub use cmatrix::CMatrix;
pub use pmatrix::{coeffs_to_traces, traces_to_coeffs, PolyMatrix};
