//! Simulation and verification toolkit for two-dimensional
//! nucleation-and-growth dynamics on Z².
//!
//! - [`lattice`]: sites, rectangles and their geometry.
//! - [`bootstrap`]: 2-neighbour bootstrap closures and the rectangles process.
//! - [`kinetics`]: the continuous-time engine and the derived processes.
//! - [`analytics`]: closed-form laws, regime predictions and estimators.
//! - [`harness`]: configuration, replica fan-out, outputs and `verify`.

pub mod analytics;
pub mod bootstrap;
pub mod harness;
pub mod kinetics;
pub mod lattice;
pub mod oracle;
pub mod rng;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
