//! Tooling for visual relationship annotation corpora.
//!
//! - [`model`]: the corpus data model, canonical files, statistics
//! - [`protocol`]: the line-oriented customization script language
//! - [`workflow`]: ordered, configurable transformation pipelines
//! - [`analyze`]: read-only queries, distributions, lint, overlays, diffs
//! - [`kg`]: lowering to triples, rule-based materialization, extraction

pub mod analyze;
pub mod kg;
pub mod model;
pub mod protocol;
pub mod workflow;
