//! Covert communication over a binary channel watched by a noisy eavesdropper
//! who may also flip a bounded fraction of the bits.
//!
//! - [`specmath`]: capacity formulas and achievable-region predicates.
//! - [`galois`]: GF(2^m) arithmetic and the keyed polynomial hash.
//! - [`channels`]: bit vectors, BSC/BAC samplers, the flip budget.
//! - [`codec`]: random codebook, list decoder, key disambiguation.
//! - [`adversary`]: detectors, likelihoods and jamming strategies.
//! - [`effcode`]: the permutation-based efficient scheme.
//! - [`harness`]: Monte Carlo and exact evaluators, sweeps.

pub mod adversary;
pub mod channels;
pub mod codec;
pub mod effcode;
pub mod error;
pub mod exec;
pub mod galois;
pub mod harness;
pub mod specmath;
pub mod stats;

pub use error::{Error, Result};
pub use exec::Execution;
