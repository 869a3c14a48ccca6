//! Landscape theory of mixed spherical p-spin glasses.
//!
//! The crate computes the complexity of critical points of the Hamiltonian
//! on spheres of radius `q√N`, the pair complexity behind Condition M, the
//! low-temperature phase quantities, and checks them against Monte Carlo
//! simulations of finite systems.

pub mod cli;
pub mod complexity;
pub mod error;
pub mod io;
pub mod mixture;
pub mod montecarlo;
pub mod optimize;
pub mod paircomplexity;
pub mod semicircle;
pub mod thermo;

pub use error::{GlassError, Result};
pub use mixture::Mixture;
