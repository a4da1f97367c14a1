//! Complex polynomials and dense complex linear algebra.

pub mod matrix;
mod parse;
pub mod poly;
pub mod roots;

pub use matrix::{
    cofactor_c, complementary_minor, det, numerical_rank, singular_values, span_basis,
    sylvester_identity_check, sylvester_identity_sides, ComplexMatrix,
};
pub use parse::{format_complex, parse_complex};
pub use poly::{ComplexPoly, Monomial, QzPoint, Var, VarKind, VarSource};
pub use roots::{polynomial_roots, univariate_coefficients};
