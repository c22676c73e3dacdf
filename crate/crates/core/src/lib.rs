//! Exact algebra for curved filtered A-infinity structures over completed
//! monoid rings, Maurer-Cartan transfer, and bubble-tree dimension counting.
//!
//! Coefficients are arbitrary-precision integers throughout. Series are
//! truncated modulo a power of the maximal ideal; every check is exact.

pub mod ainfty_core;
pub mod cone_ring;
pub mod error;
pub mod homalg;
pub mod io;
pub mod mc_transfer;
pub mod moduli_combinatorics;

pub use error::{Error, Result};
