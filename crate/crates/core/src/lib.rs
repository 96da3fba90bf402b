//! Exact coboundary and cocycle expansion of finite cell complexes over finite
//! abelian coefficient groups, together with the coboundary metric, finite
//! covers built from monodromy, combinatorial Poincaré duality on closed
//! manifolds, and minimal fillings.

#![allow(clippy::needless_range_loop)]

pub mod cochain;
pub mod complex;
pub mod covers;
pub mod duality;
pub mod error;
pub mod expansion;
pub mod generators;
pub mod gf2;
pub mod group;
pub mod io;
pub mod isoperimetry;
pub mod linalg;
pub mod metric;
pub mod search;

pub use cochain::{classify_cochain, codifferential, differential, Chain, Cochain, CochainClass};
pub use complex::{build_complex, CellComplex, ComplexBuilder};
pub use covers::{build_cover, lifting_experiment, CoveringMap, MonodromySpec, Tower};
pub use duality::{dual_complex, DualStructure};
pub use error::{Error, Result};
pub use expansion::{expansion_constant, subgroup_distance, Algorithm, Lambda, Subgroup, Variant};
pub use group::{CoefficientGroup, Element};
pub use isoperimetry::{dehn_profile, expander_filling, min_filling, zero_dim_witness};
pub use search::Limits;
