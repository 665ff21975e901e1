//! Exact computations for ADE curve families: root data and exponent
//! identities, discriminants, heights over number fields, local densities,
//! squarefree scans and the type `A` orbit construction.

pub mod arith;
pub mod curvefam;
pub mod error;
pub mod localdens;
pub mod numfield;
pub mod orbits;
pub mod report;
pub mod rootsys;
pub mod scanner;

pub use error::{AdeError, Result};
