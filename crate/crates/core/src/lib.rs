//! Exact simulation of coined discrete-time quantum walks on cycle graphs,
//! with a native-gate transpiler, configurable depolarizing noise models and
//! a Hellinger-fidelity experiment layer.
//!
//! The pieces:
//!
//! - [`circuit`]: gate set and circuit IR, censuses, circuit/v1 documents and
//!   a brute-force unitary oracle.
//! - [`walk`]: cycle-walk circuit construction plus an independent
//!   vector-space walk oracle.
//! - [`transpile`]: lowering to {CNOT, ID, RZ, SX, X} via Gray-code
//!   multi-controlled-phase networks.
//! - [`sim`]: statevector and density-matrix evolution, depolarizing
//!   channels, seeded shot sampling.
//! - [`noise`]: per-arity-class error rates, strength scaling, calibration.
//! - [`analysis`]: Hellinger distance/fidelity and per-step series.
//! - [`sweep`]: noise-strength sweeps, data-parallel under the `parallel`
//!   feature.

pub mod analysis;
pub mod circuit;
pub mod dist;
pub mod error;
pub mod linalg;
pub mod noise;
pub mod sim;
pub mod sweep;
pub mod transpile;
pub mod walk;

pub use error::{Error, Result};
