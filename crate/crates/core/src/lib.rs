//! Optimal codes for isomorphic copies of a graph, and the description-length
//! reductions built on top of them.

pub mod blockcode;
pub mod codec;
pub mod error;
pub mod graph;
pub mod group;
pub mod num;
pub mod perm;
pub mod ranks;
pub mod reduction;
pub mod report;
pub mod selftest;

pub use num_bigint::BigUint;

/// Arbitrary-precision natural number; the default carrier for codes and ranks.
pub type BigNat = BigUint;

pub use codec::{CosetCode, CosetEncoder};
pub use error::{Error, Result};
pub use graph::{ColoredGraph, Graph};
pub use perm::Permutation;

/// Codes that fit a machine word (`n!/|Aut(G)|` below `2^64`, so `n <= 20`).
pub type CompactCosetCode = CosetCode<u64>;
