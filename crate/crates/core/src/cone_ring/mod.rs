//! The cone of generators, its dual effective monoid, the completed monoid
//! ring with its 𝔪-adic filtration, and specialization to Novikov series.

mod cone;
mod novikov;
mod series;

pub use cone::{clear_denominators, rational_pairing, Cone, ConeSpec, EffectiveClass};
pub use novikov::{NovikovSeries, Specializer};
pub use series::{BaseRing, PowerSeries};
