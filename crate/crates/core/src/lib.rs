//! Exact Zariski decompositions, S-invariants and flag bounds for the
//! delta-invariant of Du Val del Pezzo surfaces of degree one.

pub mod blowup;
pub mod catalog;
pub mod config;
pub mod delta;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod piecewise;
pub mod poly;
pub mod rat;
pub mod threefold;
pub mod zariski;

pub use error::{Error, Result};
pub use rat::{r, Rat};
