//! Exact rational polyhedral computation.

pub mod dd;
pub mod hull;
pub mod ineq;
pub mod linalg;
pub mod lp;
pub mod standard;

use thiserror::Error;

use crate::caps::CapExceeded;
use crate::Rat;

pub use hull::{
    affine_dimension, facet_enumeration, facetness, vertex_enumeration, HRepresentation,
    VRepresentation,
};
pub use ineq::InequalityFunctional;
pub use lp::{lp_maximize, LpSolution, Relation, SimplexProblem};
pub use standard::{
    is_standard_local_facet, lift_to_full_behavior, standard_facet_report, standard_facetness,
    standard_polytope_dim,
};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("cone has a lineality space; no extreme rays")]
    NotPointed,
    #[error("polyhedron is unbounded")]
    Unbounded,
    #[error("polyhedron is infeasible")]
    Infeasible,
    #[error("empty input")]
    EmptyInput,
    #[error("inequality is not tight: max {max} vs bound {bound}")]
    NotTight { max: Rat, bound: Rat },
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("{0}")]
    Cap(#[from] CapExceeded),
}
