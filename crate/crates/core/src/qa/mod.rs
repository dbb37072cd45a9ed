//! Q&A over a curated data source: spec resolution, execution, chart
//! encoding, statistical summaries and query suggestions.

use thiserror::Error;

pub mod encoding;
pub mod execute;
pub mod keystats;
pub mod rephrase;
pub mod spec;
pub mod suggest;

pub use encoding::{choose_encoding, Channel, ChartSpec, Encoding, Geometry, Mark, CHART_SPEC_VERSION};
pub use execute::{execute_spec, Cell, Column, ResultTable};
pub use keystats::{compute_key_stats, format_value, KeyStats};
pub use rephrase::{
    numbers_in, numbers_supported, rephrase_prompt, rephrase_summary, GenerationError, Summary, TextGenerator,
    REPHRASE_INSTRUCTION,
};
pub use spec::{resolve_spec, AnalyticalSpec, Filter, Limit, LimitDirection, MeasureRef, Predicate, TimeGrain, RECORD_COUNT};
pub use suggest::suggest_queries;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QaError {
    #[error("no attribute of source {source_id:?} could be bound to the query")]
    SpecUnresolvable { source_id: String },
    #[error("unknown attribute {0:?}")]
    UnknownAttribute(String),
    #[error("cannot execute spec: {0}")]
    Execution(String),
    #[error("cannot encode chart: {0}")]
    Encoding(String),
    #[error("the query produced no rows")]
    EmptyResult,
}
