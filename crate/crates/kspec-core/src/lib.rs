#![no_std]
//! Geometry and diagram machinery for knotoid spectra of open space curves.
//!
//! A polygonal curve in 3-space, projected along a generic direction, yields a
//! knotoid diagram: an open-ended crossing diagram considered up to moves that
//! never sweep a strand across an endpoint. This crate computes those diagrams,
//! their invariants (height bounds, bracket and Jones polynomials, closures),
//! the distribution of knotoid classes over the sphere of projection
//! directions, and the quadrisecant structure of closed polygons.
//!
//! Everything here is deterministic: randomness flows from a single root seed
//! through labelled derivation, and all tallies use exact integer arithmetic,
//! so results are independent of iteration order and worker count.
//!
//! The crate is `no_std` (with `alloc`); file formats, JSON schemas, the CLI
//! and parallel drivers live in the companion crate.

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bracket;
pub mod closure;
pub mod curve;
pub mod diagram;
mod error;
pub mod genericity;
pub mod geom;
pub mod laurent;
pub mod moves;
pub mod projection;
pub mod rng;
pub mod secants;
pub mod spectrum;

pub use error::{Error, Result};
