//! # gapchain
//!
//! Desk-scale machinery for manufacturing and checking chains of `k`
//! consecutive large prime gaps: interval sieving with one residue class per
//! prime, random residue-class constructions driven by sieve weights,
//! hypergraph-covering experiments, and Maier-matrix translation of a sieved
//! interval into rows `zP + m + (x, y]` where prime chains are certified.
//!
//! ## Module map
//!
//! - [`math`]: primes, big-integer primality, CRT, Mertens products, log
//!   iterates and smooth-number counts.
//! - [`partition`]: parameter derivation (`y`, `z`, `u`, `r`, `σ`) and the
//!   disjoint prime sets `S`, `P`, `Q`.
//! - [`sieve`]: residue systems, sifted intervals, assembly of the full
//!   system, the smooth residual set and a greedy Erdős–Rankin baseline.
//! - [`weights`]: admissible tuples, sieve-weight tables and their
//!   normalized contracts, and the `ñ_p` sampler.
//! - [`construction`]: the random choice of `ā` and `n̄` with exact
//!   `X_p`, the good set `𝒫(ā)` and the goodness statistics.
//! - [`covering`]: synthetic covering instances and a nibble cover.
//! - [`maier`]: the Maier frame, row sampling, gap-chain certificates and
//!   the direct `G_k(X)` scan.
//! - [`harness`]: experiment configs, reports, the concentration checker and
//!   the pipelines behind the `gapchain` binary.
//!
//! Randomness always comes from caller-supplied seeds; see [`seed`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod construction;
pub mod covering;
pub mod error;
pub mod harness;
pub mod maier;
pub mod math;
pub mod partition;
pub mod seed;
pub mod sieve;
pub mod weights;

pub use error::{Error, Result};
pub use math::BigNat;
