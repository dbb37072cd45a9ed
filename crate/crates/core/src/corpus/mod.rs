//! Data sources, visualization metadata and their lexical enrichment.

use std::path::Path;

use thiserror::Error;

pub mod gazetteer;
pub mod infer;
pub mod lexicon;
pub mod source;
pub mod types;
pub mod viz;

pub use gazetteer::{Gazetteer, Place, PlaceKind};
pub use infer::infer_field_role;
pub use lexicon::{enrich_attribute, Lexicon, Taxonomy, TaxonomyNode, UnknownConcept};
pub use source::{build_data_source, enrich_source, load_data_source, load_source_dir, read_metadata};
pub use types::{
    parse_number, parse_temporal, Aggregate, Attribute, DataSource, DataType, Role, SourceMetadata,
};
pub use viz::{load_viz_corpus, parse_viz_corpus, Diagnostic, VizCorpus, VizDocument};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{input}: malformed CSV at row {row}: {message}")]
    Csv { input: String, row: u64, message: String },
    #[error("{input}: row {row} has {found} cells, expected {expected}")]
    RowLength { input: String, row: u64, expected: usize, found: usize },
    #[error("{input}: schema error: {message}")]
    Schema { input: String, message: String },
    #[error("{path}: invalid metadata: {message}")]
    Metadata { path: String, message: String },
    #[error("cannot infer a role for an all-blank column")]
    BlankColumn,
}

impl CorpusError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CorpusError::Io { path: path.display().to_string(), source }
    }

    pub(crate) fn csv(input: &str, row: u64, err: csv::Error) -> Self {
        CorpusError::Csv { input: input.to_string(), row, message: err.to_string() }
    }

    pub(crate) fn schema(input: &str, message: impl Into<String>) -> Self {
        CorpusError::Schema { input: input.to_string(), message: message.into() }
    }
}
