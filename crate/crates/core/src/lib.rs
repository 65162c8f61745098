//! Coarse graph structure: tie-broken geodesics, quasi-bounded line
//! decompositions, fat minors of subdivided binary trees and the century
//! pipeline that produces either a decomposition certificate or a fat-minor
//! witness.

pub mod corpus;
pub mod decomp;
pub mod enumerate;
pub mod error;
pub mod graph;
pub mod json;
pub mod metric;
pub mod minors;
pub mod pipeline;

pub use error::{Error, Result};
pub use graph::{Graph, VertexSet, INF};
pub use metric::{LambdaPath, TieBreakKind, TieBreaker};
