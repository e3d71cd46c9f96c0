//! Exact integer arithmetic for the braid group action on full exceptional
//! sequences over weighted projective lines, modeled at the level of the
//! Grothendieck group.
//!
//! The engine works purely with weight data; no parameter sequences appear
//! anywhere. Sequences are tuples of integer classes, mutations follow the
//! class-level case rules, and the verification tools (determinant
//! invariant, helix identities, braid relations, Riemann-Roch, perpendicular
//! structure, tilting spread) are all exact, tolerance zero.

pub mod error;
pub mod invariants;
pub mod io;
pub mod ktheory;
pub mod linalg;
pub mod mutation;
pub mod orbit;
pub mod sequences;
pub mod tilting;
pub mod weights;

pub use error::{Error, Result};
pub use ktheory::{EulerLattice, K0Class};
pub use mutation::{BraidWord, MutationCase};
pub use sequences::ExcSeq;
pub use weights::{LVec, WeightType};
