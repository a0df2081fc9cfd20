//! Admissible tuples, sieve-weight tables and the `ñ_p` sampler.
//!
//! Two weight kinds share one interface. `Uniform` puts weight 1 on every
//! `n ∈ [−y, y]`. `Maynard` is a single-variable Selberg/Maynard weight
//!
//! ```text
//! w(p, n) = ( Σ_{d_i | n + h_i p} (∏ μ(d_i)) · F(Σ log d_i / log R) )²,
//! F(t) = max(1 − t, 0)^r,   R = x^θ,
//! ```
//!
//! over `d_1, …, d_r` with squarefree product `< R`, coprime to the primes
//! `≤ r` and to `B0`. Downstream code only consumes normalized quantities
//! (`w / row sum`), so either kind can drive the random construction.

mod contracts;
mod sampler;
mod table;
mod tuple;

pub use contracts::{weight_contract_report, ContractOptions, WeightContractReport};
pub use sampler::{sample_n_tilde, NTildeSampler};
pub use table::{build_weights, WeightKind, WeightRow, WeightTable, DEFAULT_R_CAP, DEFAULT_THETA};
pub use tuple::{first_primes_tuple, is_admissible, AdmissibleTuple};
