//! Dense quantum circuit simulation with closed-timelike-curve semantics.
//!
//! Two CTC models are provided:
//!
//! * [`dctc`]: Deutsch's fixed-point model. The CTC register must equal its own
//!   image under the channel induced by the circuit; ties are broken by maximum
//!   von Neumann entropy.
//! * [`pctc`]: the post-selected (projective) model. Each CTC wire is simulated
//!   by a maximally entangled pair whose halves are projected back onto the same
//!   entangled state after the interaction.
//!
//! [`scenario`] encodes signaling, forcing and relay experiments on top of both
//! models together with a frame-ordering consistency analyzer, and [`cli`]
//! backs the `ctcsim` binary.

pub mod circuit;
pub mod cli;
pub mod dctc;
pub mod error;
pub mod linalg;
pub mod numfmt;
pub mod pctc;
pub mod report;
pub mod scenario;
pub mod state;

pub use error::{Error, Result};
