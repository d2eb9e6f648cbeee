// SPDX-License-Identifier: Apache-2.0

//! Reduced Google matrix analysis of a node subset of a directed graph.
//!
//! The crate is `no_std` (with `alloc`) when built without default features.
//! The `parallel` feature (on by default) pulls in `std` and spreads the
//! sparse operator passes, the reduced-matrix column solves and the batched
//! sensitivity runs over a rayon pool. Every parallel reduction is carried out
//! over fixed-size chunks in a fixed order, so results are bit-identical for
//! any thread count.
//!
//! Pipeline:
//!
//! 1. [`graph::DirectedGraph`] holds the binary adjacency, stored by source.
//! 2. [`google`] applies the Google matrix implicitly and computes PageRank.
//! 3. [`reduced::compute_reduced`] builds the reduced matrix of a
//!    [`subset::SubsetSpec`] and splits it into direct, PageRank and hidden
//!    link components.
//! 4. [`sensitivity`] measures logarithmic PageRank derivatives under a
//!    relative boost of one reduced-matrix link.
//! 5. [`netstruct`] extracts top-k friend networks from the direct plus
//!    hidden-link weights.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod dense;
pub mod error;
pub mod google;
pub mod graph;
pub mod netstruct;
mod par;
pub mod reduced;
pub mod sensitivity;
pub mod subset;

pub use dense::DenseMatrix;
pub use error::{Error, Result};
pub use google::{GoogleParams, PageRankResult};
pub use graph::{DirectedGraph, EdgePolicy, ValidationReport};
pub use reduced::{ReducedParams, ReducedSet, Weights};
pub use sensitivity::{Perturbation, SensitivityReport};
pub use subset::SubsetSpec;
