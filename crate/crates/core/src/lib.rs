//! Quantum time-of-arrival densities for one- and two-particle states.
//!
//! Arrivals at a detection point X are counted with the crossing-state
//! density Π(t, X) = Σ_α |⟨v_α|ψ(t)⟩|², split into arrivals from the left
//! (α = +) and from the right (α = −). Two-particle densities are the
//! expectation of the one-body operator Π̂⊗1 + 1⊗Π̂, so they integrate to
//! the number of arrivals and carry the exchange cross terms of bosons
//! and fermions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod arrivals;
pub mod error;
pub mod evolution;
pub mod grid;
pub mod multiparticle;
pub mod scenario;
pub mod states;
pub mod statistics;

pub use error::{Error, Result};
pub use statistics::Statistics;
