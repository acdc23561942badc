//! Peer-grade aggregation with graph convolution over a
//! social-ownership-assessment network.
//!
//! Users grade items, own items, and know each other. [`graph::SoanGraph`]
//! holds those three relations, [`propagation::PropagationMatrix`] turns them
//! into a row-normalized operator, and [`gcn`] learns to predict true item
//! values from a small labeled subset. [`synthetic`] generates benchmark
//! scenarios and [`harness`] scores methods under Monte Carlo
//! cross-validation.

pub mod baselines;
pub mod error;
pub mod gcn;
pub mod graph;
pub mod harness;
pub mod io;
pub mod propagation;
pub mod rng;
pub mod sparse;
pub mod synthetic;

pub use error::{Error, Result};
pub use graph::{build_graph, Dataset, GraphBuilder, GroundTruth, SoanGraph, Split};
pub use propagation::{propagation_matrix, PropagationMatrix};
