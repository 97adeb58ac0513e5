//! Exact scattering diagrams, broken lines and theta functions for rank-2 cluster seeds.

pub mod broken_lines;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod lattice;
pub mod matrix;
pub mod polytope;
pub mod render;
pub mod scattering;
pub mod seed;
pub mod series;
pub mod tropical;
pub mod verify;

pub use error::{Error, Result};
