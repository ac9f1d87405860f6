//! Preserving a dissipating cavity cat state with repeated dispersive
//! parity probes.
//!
//! - [`fock`]: truncated Fock-space states, operators and distance measures.
//! - [`analytic`]: closed forms for the damped cat and probe statistics.
//! - [`lindblad`]: exact damping channel and an RK4 cross-check.
//! - [`protocol`]: the probe sequence as a seeded Monte Carlo state machine.

pub mod analytic;
pub mod error;
pub mod fock;
pub mod lindblad;
pub mod protocol;

pub use error::{Error, Result};
pub use fock::{ComplexAmplitude, FockMatrix, FockVector, Parity};
