//! Cycle structures of Rédei permutations over the projective line
//! `P^1(F_q) = F_q ∪ {∞}` for odd prime powers `q`.
//!
//! The crate is split along the two sides of every computation:
//!
//! - [`gf`] and [`redei`] evaluate Rédei functions point by point and
//!   decompose the resulting permutations by walking orbits. This is the
//!   brute-force side and is limited to fields that can be enumerated.
//! - [`numthy`], [`cyclestruct`], [`catalog`] and [`families`] work purely
//!   with the integer `q - χ` and its factorization, and scale to fields far
//!   beyond enumeration (`q = 3^60` and the like).
//!
//! [`verify`] ties the two together as exhaustive sweeps, fanned out through
//! [`exec`] which runs on rayon when the `parallel` feature is enabled and
//! falls back to plain iterators otherwise.

pub mod catalog;
pub mod cyclestruct;
mod error;
pub mod exec;
pub mod families;
pub mod gf;
pub mod numthy;
pub mod redei;
pub mod verify;

pub use catalog::{PairCatalog, StructureClass};
pub use cyclestruct::{Chi, CycleStructure, Modulus};
pub use error::{Error, Result};
pub use exec::Execution;
pub use families::FamilyPrediction;
pub use gf::{Field, FieldElement, ProjectivePoint};
pub use numthy::PrimeFactorization;
pub use redei::{PermutationTable, RedeiSpec};
