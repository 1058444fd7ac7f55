pub mod error;
pub mod exceedance;
pub mod extremal;
pub mod harness;
pub mod limits;
pub mod mixing;
pub mod rng;
pub mod stats;
pub mod scenery;
pub mod walk;

pub use error::{Error, Result};
