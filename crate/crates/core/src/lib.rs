//! Algorithms for antichains in the Boolean lattice and in random subfamilies of it.
//!
//! The crate is `no_std` and needs only `alloc`. Everything here is a pure function of its
//! inputs; file formats, the command line and parallel fan-out live in `sperner-lab`.
//!
//! Vertices of the lattice `P(n)` are subsets of `{1, ..., n}` encoded as bitmasks, with bit
//! `i - 1` set when element `i` is present. Two distinct vertices are adjacent in the
//! comparability graph when one contains the other, so antichains are exactly the independent
//! sets of that graph.

#![no_std]

extern crate alloc;

pub mod antichain;
pub mod bounds;
pub mod container;
pub mod enumeration;
pub mod error;
pub mod kleitman;
pub mod lattice;
mod matching;
pub mod sampling;

pub use error::{Error, Result};
pub use lattice::{LatticeParams, SubsetVertex, VertexSet};
