//! Curved filtered A-infinity algebras, categories, bimodules and functors
//! over the completed monoid ring.

mod algebra;
mod bimodule;
mod cunit;
mod deform;
pub mod fixtures;
mod functor;
mod relations;

pub use algebra::{int, CurvedAlgebra, CurvedCategory, Element, Generator, OpTable};
pub use bimodule::{Bimodule, BimoduleKey};
pub use cunit::{gr0_complex, verify_cunit, Gr0Complex};
pub(crate) use deform::deform_unchecked;
pub use deform::{bc_structure_maps, check_mc, deform};
pub use functor::{pushforward_mc, relabel, CurvedFunctor};
pub use relations::{check_curved_ainfty, composable_tuples, relation_residual, RelationReport, Violation};
