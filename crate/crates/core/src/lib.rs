//! Exact arithmetic for truncated p-typical Witt vectors over
//! F_p[T1..Tn], their embedding into (Z/p^L)[T1..Tn], canonical lifts of
//! Hasse-Schmidt derivations and the algebra of Witt differential operators.

pub mod embed;
pub mod error;
pub mod exactnum;
pub mod frob_phi;
pub mod hs_lift;
pub mod poly;
pub mod sample;
pub mod verify;
pub mod wdo;
pub mod witt;

pub use error::{Result, WittError};
pub use witt::{GhostVec, WittVec};
