//! Exact, desk-scale computations around balanced graph separations.
//!
//! The crate computes width parameters (minimum balanced separation order,
//! separation number, treewidth) exactly on small graphs, enumerates
//! g-separations and tangles on tiny graphs, builds W-clouds via a
//! node-split flow network with confluent rounding, and audits the
//! arithmetic that ties the separation number linearly to treewidth.
//!
//! All quantities that enter a validity decision are integers or exact
//! rationals; there is no floating point anywhere in the crate.
//!
//! The crate is `no_std` (with `alloc`): it performs no IO and has no
//! platform dependencies. The companion CLI crate carries file formats
//! and report rendering.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod cloud;
pub mod error;
pub mod flow;
pub mod graph;
pub mod harness;
pub mod rational;
pub mod tangle;
pub mod width;

pub use error::{Error, ErrorKind};
pub use rational::Rat;
