//! Dimension counts for stable trees of spheres and discs relative to a
//! normal crossings divisor, and the combinatorics of their strata.

mod disc;
mod geometry;
mod strata;
mod types;

pub use disc::{bubble_config_dim, disc_dim, forgetful_dim_diff, sphere_exclusion, Attachment, BubbleConfig, BubbleDim, ExclusionReport};
pub use geometry::{
    c1_subvariety, canonical_tangency, monomial_weight, monomial_weight_of, sym_q_order, ClassRef, GeometrySpec, KSet, SphereClass,
    TangencyData,
};
pub use strata::{enumerate_dm_strata, Boundary, DiscNode, Interior, Stratum};
pub use types::{bound_gap_parts, dim_gamma, dim_upper_bound, enumerate_types, CombinatorialType, Vertex, MAX_TREE_VERTICES};
