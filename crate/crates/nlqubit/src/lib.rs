//! Mean-field simulator for a qubit encoded in a rotating two-mode
//! Bose-Einstein condensate.
//!
//! The condensate qubit evolves under a *nonlinear* Schrödinger equation:
//! besides rigid x and z rotations of the Bloch sphere, the atomic
//! interactions generate a z-axis torsion whose rotation rate is
//! proportional to the state's own z coordinate. That torsion is the
//! resource exploited by the single-input state-discrimination protocols
//! in [`discrimination`], and it is validated against exact many-body
//! evolution in the two-mode Fock basis in [`fock`].
//!
//! Module map:
//! - [`qubit`]: state representations, Bloch geometry, overlaps, trace
//!   distances.
//! - [`meanfield`]: the nonlinear equation of motion, control schedules,
//!   rigid rotations, and Bloch-sphere flow fields.
//! - [`fock`]: exact two-mode model — encodings, Hamiltonian assembly,
//!   propagation, correlators, reduced density matrix, and the mean-field
//!   model error.
//! - [`discrimination`]: input preparation, torsion / feedback-controlled
//!   discrimination, readout, and seeded trial batches.
//!
//! The crate is `no_std`-compatible (requires `alloc`); disable the
//! default `std` feature for embedded use.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod discrimination;
mod error;
pub mod fock;
pub mod meanfield;
pub mod qubit;
pub mod tridiag;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Crate version, recorded in run manifests by downstream tools.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
