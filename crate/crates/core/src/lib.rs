//! Multi-view modularity clustering.
//!
//! This crate holds the numeric core: it is `no_std` and only needs `alloc`.
//! File formats, ingestion of post records and the command line live in the
//! `mvmc` companion crate.
//!
//! The pipeline, bottom to top:
//!
//! - [`matrix`]: sparse per-view feature matrices, tf-idf weighting and cosine
//!   similarity.
//! - [`knn`]: symmetric k-nearest-neighbour similarity graphs.
//! - [`graph`]: the undirected weighted [`ViewGraph`] and dense [`Clustering`].
//! - [`modularity`]: weighted, resolution-parameterised multi-view modularity
//!   and a Louvain-style maximiser that optimises one shared partition.
//! - [`propensity`] and [`mvmc`]: degree-corrected edge propensities and the
//!   iterative resolution/weight re-estimation driver.
//! - [`compare`], [`meta`], [`ensemble`]: adjusted Rand index, cross-levelling
//!   of clusterings over different object sets, average-linkage
//!   meta-clustering and bipartite consensus clustering.
//! - [`users`]: user-base statistics for clusters of hashtags.
//! - [`synth`]: planted-partition generators used for validation.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod compare;
pub mod ensemble;
mod error;
pub mod graph;
pub mod knn;
pub mod matrix;
pub mod meta;
pub mod modularity;
pub mod mvmc;
pub mod propensity;
pub mod synth;
pub mod users;

pub use compare::{adjusted_rand_index, LabeledClustering, Membership};
pub use error::{Error, Result};
pub use graph::{Clustering, Edge, ViewGraph};
pub use knn::{knn_graph, NeighborCount};
pub use matrix::{IdfMode, SparseMatrix};
pub use modularity::{maximize, rb_modularity, Louvain, ViewParams};
pub use mvmc::{run_mvmc, IterationRecord, MvmcConfig, MvmcTrace};
pub use propensity::{edge_propensities, update_resolution, update_weights, Propensities};
