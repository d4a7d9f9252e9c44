//! Exact integer and Laurent-polynomial linear algebra.

mod int_matrix;
mod laurent;
mod minors;

pub use int_matrix::{cokernel, hermite_normal_form, Cokernel, smith_normal_form, IntMatrix, SnfResult};
pub use laurent::{variable_name, Exponent, LaurentPoly};
pub use minors::{maximal_minors_gcd, minors_gcd, subsets, PolyMatrix};
