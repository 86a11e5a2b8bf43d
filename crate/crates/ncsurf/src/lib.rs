//! Noncommutative Laurent phenomenon for triangulated polygons and surfaces.

pub mod laurent;
pub mod mutation;
pub mod oracle;
pub mod polygon;
pub mod presentation;
pub mod suite;
pub mod surfaces;
pub mod wordcore;
