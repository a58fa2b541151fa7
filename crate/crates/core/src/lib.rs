//! Entanglement of bosonic field theories on an interval via Hamiltonian truncation.
//!
//! The pipeline: enumerate truncated Fock bases, map the full-interval modes onto
//! two subintervals with a Bogoliubov transform, build the overlap matrix between
//! the full basis and the split product basis, and push ground, thermal or
//! quenched states through it to obtain reduced density matrices.
//! [`gaussian`] provides an independent lattice covariance-matrix solver for free
//! theories.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cache;
pub mod entanglement;
pub mod error;
pub mod fock_basis;
pub mod gaussian;
pub mod harness;
pub mod ht_models;
pub mod linalg;
pub mod mode_splitting;
pub mod overlap;
pub mod pairing;
pub mod special;
pub mod states;

pub use error::{Error, Result};
