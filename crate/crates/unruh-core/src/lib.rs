//! Noninertial quantum dynamics on truncated Fock spaces.
//!
//! A uniformly accelerated observer sees an inertial mode through a two-mode
//! squeezing transformation; tracing the causally hidden partner mode turns
//! inertial-frame states into noisier noninertial ones. This crate realizes
//! that dynamics as an explicit completely positive trace-preserving map on
//! truncated Fock spaces and verifies its properties numerically:
//!
//! - [`fock`]: dense multipartite linear algebra (signatures, partial trace,
//!   Hermitian eigensolver).
//! - [`channel`]: the bosonic-amplifier Kraus family, certified truncation
//!   tails, Choi matrices, and CPTP verification.
//! - [`dilation`]: the independent isometry-plus-partial-trace construction
//!   used as an oracle for the Kraus path.
//! - [`measures`]: coherence/entanglement quantifiers and state distances.
//! - [`resource`]: free-state predicates, free operations, and the
//!   resource-nongenerating property suites.
//! - [`counterexample`]: a prior amplifier formulation that fails trace
//!   preservation, reproduced side by side with the corrected map.
//! - [`sweep`]: deterministic acceleration sweeps and the verification
//!   bundle behind the `unruh` command-line tool.
//!
//! # Example
//!
//! ```
//! use unruh_core::channel::{apply_channel, kraus_multiparty, AccelerationParam, ChannelSpec};
//! use unruh_core::measures::l1_coherence;
//! use unruh_core::states;
//!
//! # fn main() -> unruh_core::Result<()> {
//! // two qubits, second party accelerated at r = 0.6,
//! // truncation certified to a 1e-10 trace tail
//! let spec = ChannelSpec::certified(
//!     vec![2, 2],
//!     vec![1],
//!     vec![AccelerationParam::from_r(0.6)?],
//!     1e-10,
//! )?;
//! let ks = kraus_multiparty(&spec)?;
//!
//! let out = apply_channel(&ks, &states::preset("bell-phi-plus")?)?;
//! assert!(out.trace_deficit() <= ks.tail_bound());
//! let coherence = l1_coherence(&out.renormalized());
//! assert!(coherence > 0.0);
//! # Ok(()) }
//! ```

pub mod channel;
pub mod counterexample;
pub mod dilation;
pub mod error;
pub mod fock;
pub mod measures;
pub mod report;
pub mod resource;
pub mod sample;
pub mod states;
pub mod sweep;

pub use error::{Error, Result};
pub use fock::{C64, CMatrix, DensityMatrix, DimSignature, FockOperator};
