//! Exact computation of the taut polynomial of veering triangulations, by branch
//! relations matrices and by Fox calculus, together with vertical surgery.

pub mod algebra;
pub mod branched_surface;
pub mod error;
pub mod group_theory;
pub mod perm;
pub mod signature;
pub mod surgery;
pub mod taut_polynomial;
pub mod triangulation;

pub use error::{Error, Result};
