//! Contact-discontinuity solver for the Aw-Rascle traffic model with a
//! vanishing pressure `eps^2 p(rho)`, built on the method of characteristics
//! in Lagrangian coordinates, plus the pressureless-Euler closed-form oracle
//! and an experiment harness measuring the `O(eps^2)` limit rates.

pub mod characteristics;
pub mod cli;
pub mod config;
pub mod error;
pub mod euler_map;
pub mod experiments;
pub mod fields;
pub mod initial_data;
pub mod interp;
pub mod pressure;
pub mod pressureless;
pub mod report;

pub use error::{Result, SolverError};
