//! Time-dependent coherent squeezed states of quadratic Hamiltonians,
//! constructed from linear integrals of motion.

pub mod cli;
pub mod config;
pub mod error;
pub mod hamiltonian;
pub mod mathieu;
pub mod motion;
pub mod observables;
pub mod ode;
pub mod states;

pub use error::{Error, Result};
