//! Conditional photon subtraction at a 50/50 beam splitter, simulated on
//! truncated Fock spaces.
//!
//! The model: a single-mode input state enters one port of a balanced beam
//! splitter, vacuum enters the other. Counting `n` photons in the idler output
//! projects the signal output onto an `n`-photon-subtracted version of the
//! input. This crate provides
//!
//! * dense single-mode and two-mode state types over `|0..N>` with explicit
//!   truncation bookkeeping ([`fock`]),
//! * the balanced beam splitter in closed form plus exact blockwise
//!   exponentiation for arbitrary mixing parameters ([`beamsplitter`]),
//! * the subtraction decomposition: success probabilities, conditional
//!   states, and a separability test for the output ([`subtraction`]),
//! * constructors and closed-form normalizations for the state families the
//!   model is usually fed with: coherent states, squeezed vacuum, odd-photon
//!   squeezed states, and optical cat states ([`states`]),
//! * Wigner distributions on phase-space grids ([`wigner`]),
//! * derived observables: Bell-pair checks for cat inputs, probability
//!   sweeps, and parameter matching between subtraction routes
//!   ([`analysis`]),
//! * a deterministic command-line front end ([`cli`]).
//!
//! All state vectors are plain dense `Complex64` amplitude arrays; every
//! constructor records an upper bound on the probability mass discarded by
//! truncation. Closed-form normalizations are evaluated in log space so that
//! factorial growth never overflows intermediate quantities.

pub mod analysis;
pub mod beamsplitter;
pub mod cli;
pub mod error;
pub mod fock;
pub mod special;
pub mod states;
pub mod subtraction;
pub mod wigner;

pub use error::{Error, Result};
pub use fock::{FockAmplitudes, SchmidtSpectrum, TwoModeState};
