//! Exact arithmetic shared by the rest of the crate.

pub mod factor;
pub mod linalg;
pub mod mpoly;
pub mod poly;
pub mod resultant;
pub mod ring;

pub use ring::{Int, IntRing, Ring, ZZ};
