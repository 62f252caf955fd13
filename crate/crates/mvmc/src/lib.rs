//! File formats, ingestion, pipeline orchestration and reporting around
//! `mvmc-core`.

pub mod config;
pub mod corpus;
mod error;
pub mod formats;
pub mod ingest;
pub mod pipeline;
pub mod report;

pub use error::{Error, Result};
