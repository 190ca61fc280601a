pub mod cli;
pub mod coeff;
pub mod diffpoly;
pub mod error;
pub mod hierarchy;
pub mod loopalg;
pub mod nhd;
pub mod numerics;
pub mod quasi;
pub mod report;
mod linsolve;
pub mod rewrite;

pub use coeff::Coeff;
pub use diffpoly::{Context, DiffPoly, Field, JetVar, Parity, PolyParity};
pub use error::{Error, Result};
