//! Residue systems and sifted intervals.

mod assemble;
mod greedy;
mod residue;
mod sifted;

pub use assemble::{assemble_full_system, residual_smooth_set, ResidualReport};
pub use greedy::greedy_rankin;
pub use residue::{sifted_membership, ResidueSystem, SmallClassVector};
pub use sifted::{sift_interval, SievedSet};
