//! Exact values and asymptotic approximations of Stirling numbers of the second kind.
//!
//! All exact work is done with big integers and rationals; real-valued
//! evaluations run at a configurable MPFR precision.

pub mod coeffs;
pub mod error;
pub mod exact;
pub mod expansions;
pub mod harness;
pub mod params;
pub mod poly;
pub mod precision;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
pub use precision::SolverConfig;
