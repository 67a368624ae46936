//! Contraction trees for tensor networks.
//!
//! This crate plans, costs and executes tensor-network contractions through
//! rooted and unrooted contraction trees. Wire routings through a tree give
//! vertex and edge congestions, and those congestions give the exact
//! sequential time, peak memory and parallel time of the contraction. The
//! same trees convert to and from branch and tree decompositions of the line
//! graph, bridging to the treewidth toolbox.
//!
//! Entry points:
//! - [`graph::Network`]: the tensor network (weighted hypergraph + tensors)
//! - [`tree::ContractionTree`]: rooted/unrooted trees over the network
//! - [`congestion`]: routings and congestion maps
//! - [`cost`]: exact time / space / parallel-time reports
//! - [`planner`]: exhaustive, greedy and linear planning plus slicing
//! - [`exec`]: the numeric executor with its memory tracker and oracle
//! - [`bridge`]: branch/tree decompositions and the conversions
//! - [`formats`]: the `tn v1` network and nested-paren tree text formats

pub mod bridge;
pub mod circuit;
pub mod congestion;
pub mod cost;
pub mod error;
pub mod exec;
pub mod formats;
pub mod graph;
pub mod planner;
pub mod tensor;
pub mod tree;

pub use error::{Error, Result};
pub use graph::{Edge, EdgeId, Network, SimpleGraph, VertexId};
pub use tensor::DenseTensor;
pub use tree::{ContractionTree, NodeId};
