#![forbid(unsafe_code)]

//! Multipartite Bell tests for bound entangled states.
//!
//! The crate builds the three-setting Bell operators whose classical
//! bound is 2^(n-1) sqrt(3), evaluates them on the bound entangled
//! family rho_n(alpha), derives entanglement witnesses from them, and
//! checks measured behaviors against local hidden variable models by
//! linear programming.

pub mod algebra;
pub mod bell;
pub mod cli;
pub mod error;
pub mod lhv;
pub mod linalg;
pub mod simplex;
pub mod tol;
pub mod witness;

pub use error::{Error, Result};
