//! Link prediction on directed graphs via line-graph convolution over fused
//! structural features.
//!
//! The pipeline turns each candidate edge `(x, y)` into a small classification
//! problem: extract the enclosing subgraph around the pair, label every node
//! with its path-distance role, attach community and spectral embedding
//! features, transform the subgraph into its directed line graph (edges become
//! nodes), and run a graph convolutional classifier whose readout is the line
//! node corresponding to `(x, y)` itself.
//!
//! The crate also ships the analytical companion pieces used to reason about
//! when community information helps: stochastic block model generation, the
//! hybrid-predictor advantage condition `g(p, q, K)`, and a Monte Carlo
//! harness that checks the closed-form accuracy expressions against sampled
//! outcomes.
//!
//! Modules:
//! - [`graph`]: compact directed graph storage and edge-list I/O.
//! - [`split`]: observed/test edge splits with sampled non-edges.
//! - [`sbm`]: stochastic block model generation and the advantage condition.
//! - [`drnl`]: double-radius path labels for enclosing subgraphs.
//! - [`community`]: greedy modularity community detection.
//! - [`embed`]: spectral node embeddings for directed graphs.
//! - [`features`]: feature matrices, one-hot encoding, fusion.
//! - [`linegraph`]: enclosing subgraph extraction and line-graph transform.
//! - [`model`]: the line-graph GCN, training loop, checkpoints.
//! - [`eval`]: ranking metrics and classical neighborhood heuristics.
//! - [`synth`]: deterministic synthetic citation-style benchmark graphs.
//! - [`pipeline`]: end-to-end experiment orchestration.
//! - [`rng`]: seed handling and named deterministic substreams.

pub mod community;
pub mod drnl;
pub mod embed;
pub mod eval;
pub mod features;
pub mod graph;
pub mod linegraph;
pub mod model;
pub mod pipeline;
pub mod rng;
pub mod sbm;
pub mod split;
pub mod synth;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
