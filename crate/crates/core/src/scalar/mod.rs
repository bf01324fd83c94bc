//! The scalar tower: Q(i) constants, polynomials and rational functions in
//! named parameters, and Laurent polynomials in the deformation variable.

pub mod gq;
pub mod laurent;
pub mod parse;
pub mod poly;
pub mod ratfun;

pub use gq::Gq;
pub use laurent::{s_var, LaurentPoly};
pub use parse::{parse_combination, parse_scalar, parse_scalar_with, Lin, ParseError};
pub use poly::{Mono, Poly, Var};
pub use ratfun::{register_atom, NonZero, Scalar, ScalarError};
