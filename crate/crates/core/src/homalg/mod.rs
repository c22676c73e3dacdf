//! Exact linear algebra over the integers: Smith normal form, integer
//! solving, and homology of two-periodic complexes of free abelian groups.

mod complex;
mod matrix;
mod snf;

pub use complex::{mapping_cone, Homology, HomologyPiece, IntComplex};
pub use matrix::IntMatrix;
pub use snf::{kernel_basis, rank, smith_normal_form, solve_integer, verify_snf, Snf};
