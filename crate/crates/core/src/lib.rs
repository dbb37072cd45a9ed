//! Hybrid semantic search over data repositories.
//!
//! A query is parsed for analytical intent and matched against curated data
//! sources. When both an intent and a confident source match are present the
//! engine answers with a generated chart specification and a short statistical
//! summary; in every case it also returns ranked, facetable pre-authored
//! visualizations.
//!
//! The crate is organised by pipeline stage:
//!
//! - [`corpus`]: data sources, visualization metadata, lexicon enrichment
//! - [`index`]: analyzer, inverted index and BM25 ranking
//! - [`parser`]: n-grams, CKY intent grammar, field matching
//! - [`classifier`]: routing between Q&A and general search
//! - [`qa`]: spec resolution, execution, encoding, key statistics, summaries
//! - [`vizsearch`]: exploratory and design search, facets
//! - [`engine`]: the end-to-end pipeline producing a [`engine::HybridResult`]

pub mod classifier;
pub mod corpus;
pub mod engine;
pub mod index;
pub mod parser;
pub mod qa;
pub mod resources;
pub mod vizsearch;

pub use engine::{Engine, EngineError, EngineSettings, HybridResult, SearchRequest};
pub use resources::Resources;
