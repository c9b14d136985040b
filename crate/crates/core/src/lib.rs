//! Decide whether an observed input-output correlation can be produced by a
//! given quantum channel, using exact witness thresholds, and cross-check
//! those thresholds with brute-force numerical searches.

pub mod channels;
pub mod cli;
pub mod compat;
pub mod correlation;
pub mod error;
pub mod geometry;
pub mod numerics;
pub mod oracle;
pub mod polytope;
pub mod sampling;
pub mod witness;

pub use correlation::Correlation;
pub use error::{Error, Result};
