//! Analysis toolkit for temporal blog-citation corpora.
//!
//! The pipeline: ingest a line-delimited post-event stream into a
//! [`corpus::TemporalCorpus`]; aggregate citation graphs at any cut-off day
//! and measure attention, detachment, social and detachment-based distances,
//! edge range, and total attention ([`graphmetrics`]); build tf·idf-adjusted
//! term profiles and cosine semantic distances ([`semantics`]); estimate
//! link-creation propensities over rolling windows ([`propensity`]); extract
//! per-URL diffusion subgraphs and transmission statistics ([`diffusion`]);
//! and generate synthetic corpora with known dynamics for estimator
//! validation ([`synthgen`]).

pub mod corpus;
pub mod diffusion;
mod error;
pub mod graphmetrics;
pub mod ids;
pub mod propensity;
pub mod rational;
pub mod report;
pub mod semantics;
pub mod synthgen;

pub use error::{Error, Result};

/// Crate version, surfaced by the CLI and the run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
