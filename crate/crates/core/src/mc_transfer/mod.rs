//! The triangle algebra of a bimodule, its deformation by a closed element,
//! and the order-by-order Maurer-Cartan transfer.

pub mod problems;
mod transfer;
mod triangle;

pub use transfer::{transfer_mc, verify_transfer, CunitLift, OrderLog, TransferResult};
pub use triangle::{deform_by_f, is_quasi_iso, verify_projections, ProjectionReport, TriangleAlgebra};
