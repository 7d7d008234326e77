//! Unitary-similarity-invariant functionals of complex matrices
//! (pseudospectra, generalized numerical ranges, unitary invariant norms) and
//! numerical checks for maps preserving them on skew products `A^*B`.

pub mod error;
pub mod linalg;
pub mod numrange;
pub mod pseudospec;
pub mod region;
pub mod preserver;
pub mod report;
pub mod suites;
pub mod sweep;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, RankOne, C64};
