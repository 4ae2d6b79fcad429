//! Exact state-vector simulation of cavity-QED pipelines that engineer
//! hyperentangled cluster and ring graph states of neutral atoms.
//!
//! Type-1 atoms carry an internal qubit `{b, a}` and a quantized transverse
//! momentum `{P₀, P₋₂}`; auxiliary atoms carry `{g, e}`; cavities are Fock
//! modes truncated at a configurable cutoff. Every interaction is an exact
//! unitary on a dense state vector over the tensor product of these spaces.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. File formats, the protocol language and the command line live in
//! the companion `hypercavity` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod analysis;
mod error;
pub mod interactions;
pub mod math;
pub mod measurement;
pub mod noise;
pub mod params;
pub mod protocol;
pub mod tensor;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use tensor::{
    basis_state, inner, kron_oracle, DensityMatrix, GateOp, StateVector, Subsystem, SubsystemKind,
    SubsystemLayout,
};

/// Tolerance for norms and traces.
pub const NORM_TOL: f64 = 1e-12;
/// Tolerance for unitarity and oracle comparisons.
pub const UNITARY_TOL: f64 = 1e-10;
/// Default cap on the total dimension for dense-Kronecker oracles.
pub const DEFAULT_ORACLE_CAP: usize = 4096;
