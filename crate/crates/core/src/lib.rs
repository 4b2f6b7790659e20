//! Adaptive binary encoding of continuous variables for QUBO/Ising optimization.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: binary polynomials, QUBO and Ising forms, degree reduction,
//!   device scaling and control-error perturbation.
//! - [`encoding`]: fixed-point binary encodings of real variables and the
//!   adaptive range update driven by the two previous iterates.
//! - [`solvers`]: exhaustive enumeration, simulated annealing and a noisy
//!   annealing wrapper that stands in for annealing hardware.
//! - [`rod`]: 1D rod energy assemblies (potential and complementary energy),
//!   analytic references and the H¹ error measure.
//! - [`schemes`]: the fluid-structure fixed-point coupling and the quadratic
//!   penalty method for compliance design.
//! - [`experiments`]: configuration-driven experiment runner, aggregation and
//!   CSV output.

pub mod encoding;
pub mod error;
pub mod experiments;
pub mod model;
pub mod rod;
pub mod schemes;
pub mod solvers;

pub use error::{Error, Result};
