//! Linear non-uniform cellular automata over `Z^d` with alphabet `GF(p)^k`.
//!
//! The crate represents a NUCA as a constant linear background rule plus a
//! finite (or sparse, clustered) set of perturbed cells, simulates it exactly
//! on finitely supported configurations, and decides nilpotency, periodicity,
//! eventual periodicity, the Cayley–Hamilton property, injectivity and
//! post-surjectivity with re-verified certificates.

pub mod algebra;
pub mod ca_decide;
pub mod decide;
pub mod error;
pub mod format;
pub mod nuca;
pub mod oracle;
pub mod suite;

pub use error::{NucaError, Result};
