//! Maier-matrix translation.
//!
//! With `P = P(x)/B0` and `m ≡ −a_p (mod p)` for every sieving prime, the row
//! `zP + m + t` is divisible by `p` whenever `t ≡ a_p (mod p)`. Only the
//! survivors `T` of `(x, y]` can therefore be prime in a row, and a row's
//! primes sit inside the translated survivor set. Rows are sampled, primes
//! counted, and chains of large gaps are written out as certificates that
//! [`verify_certificate`] re-checks from scratch.

mod certificate;
mod frame;
mod gk;
mod rows;

pub use certificate::{
    find_gap_chain, verify_certificate, ChainSearch, Evidence, EvidenceItem, FrameSnapshot,
    GapChainCertificate, ListedPrime, MissReport, Verdict, CERTIFICATE_VERSION,
};
pub use frame::{assemble_frame, MaierFrame, DEFAULT_BUDGET_BITS, DEFAULT_D};
pub use gk::{gk_direct, GK_LIMIT};
pub use rows::{row_primes, sample_rows, PairHit, RowStats};
