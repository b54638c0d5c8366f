//! Stable b-matchings of peers under a global ranking.
//!
//! Every peer has an intrinsic mark and all peers agree on the resulting
//! order, so a peer's identity is simply its rank. In this crate peers are
//! indexed `0..n` with index 0 the best peer; text formats and command-line
//! output use 1-based ranks.
//!
//! Under a global ranking the stable configuration is unique and the greedy
//! construction in [`solver`] finds it. The other modules study how
//! decentralized initiatives reach it ([`dynamics`]), what it looks like
//! ([`structure`]), how mate ranks are distributed on random acceptance
//! graphs ([`analytic`]), and what that means for BitTorrent share ratios
//! ([`btapp`]).

// `!(x > 0.0)` is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod btapp;
pub mod dynamics;
pub mod error;
pub mod generators;
pub mod graph;
pub mod io;
pub mod model;
pub mod solver;
pub mod stability;
pub mod structure;

pub use error::{Error, Result};
pub use generators::Seed;
pub use graph::AcceptanceGraph;
pub use model::{Configuration, Instance, Ranking, SlotCapacities};
pub use solver::{stable_configuration, Initiative};
