//! Exploratory and design search over pre-authored visualizations.

pub mod chart_types;
pub mod facets;
pub mod search;

pub use chart_types::{ChartType, ChartTypeLexicon};
pub use facets::{apply_facets, compute_facets, DateRange, FacetState, FacetSummary};
pub use search::{
    build_viz_index, design_search, exploratory_search, stored_chart_types, viz_index_input, DesignMode,
    DEFAULT_RESULT_LIMIT,
};
