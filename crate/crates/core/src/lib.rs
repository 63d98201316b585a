//! Numerical tools for the mixed-norm spaces `RM(p,q)` of analytic functions
//! on the unit disc.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bergman;
pub mod error;
pub mod exponent;
pub mod function;
pub mod mixed_norm;
pub mod quadrature;
pub mod theorem;
pub mod witness;

pub use bergman::{GridFunction, PolarGrid};
pub use error::{Error, Result};
pub use exponent::{ExponentPair, ExtendedExponent};
pub use function::{AnalyticFunction, Hotspot, LacunaryNode, WeightedTerm};
pub use mixed_norm::{NormEstimate, NormValue, QuadratureConfig};
pub use num_complex::Complex64;
