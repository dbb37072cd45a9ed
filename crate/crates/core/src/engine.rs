//! The end-to-end pipeline: parse, classify, answer with Q&A when routed
//! there, and always run general search over pre-authored visualizations.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::{build_source_index, classify, SearchPlan, Thresholds};
use crate::corpus::{Attribute, DataSource, DataType, Role, VizDocument};
use crate::index::{Analyzer, Bm25Params, IndexError, RankedResults, SearchIndex};
use crate::parser::{MatchSettings, ParsedQuery, Parser, SourceCatalog};
use crate::qa::encoding::assign_geometry_set;
use crate::qa::{
    choose_encoding, compute_key_stats, execute_spec, rephrase_summary, resolve_spec, suggest_queries,
    AnalyticalSpec, ChartSpec, KeyStats, QaError, Summary, TextGenerator,
};
use crate::resources::Resources;
use crate::vizsearch::{
    apply_facets, build_viz_index, compute_facets, design_search, DesignMode, FacetState, FacetSummary,
    DEFAULT_RESULT_LIMIT,
};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error("unknown data source {0:?}")]
    UnknownSource(String),
    #[error("index {name} does not match the corpus: {message}")]
    IndexMismatch { name: &'static str, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct EngineSettings {
    pub bm25: Bm25Params,
    pub thresholds: Thresholds,
    pub matching: MatchSettings,
    /// Pre-authored results returned per query.
    pub result_limit: usize,
    pub design_mode: DesignMode,
    /// Suggestions offered when a matched source cannot answer the query.
    pub suggestion_count: usize,
}

impl Default for EngineSettings {
    fn default() -> Self {
        Self {
            bm25: Bm25Params::default(),
            thresholds: Thresholds::default(),
            matching: MatchSettings::default(),
            result_limit: DEFAULT_RESULT_LIMIT,
            design_mode: DesignMode::Boost,
            suggestion_count: 5,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct SearchRequest {
    pub query: String,
    pub facets: FacetState,
    pub limit: Option<usize>,
    /// Answer with this source instead of the classifier's choice.
    pub source: Option<String>,
    pub thresholds: Option<Thresholds>,
    /// Skip the text generator even when one is configured.
    pub no_generation: bool,
}

impl SearchRequest {
    pub fn new(query: impl Into<String>) -> Self {
        Self { query: query.into(), ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SourceShare {
    pub source_id: String,
    pub name: String,
    /// Share of the total match score, in percent.
    pub percentage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct QaAnswer {
    pub source_id: String,
    pub source_ranking: Vec<SourceShare>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<AnalyticalSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart_spec: Option<ChartSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key_stats: Option<KeyStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<Summary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suggestions: Option<Vec<String>>,
    /// Why no chart could be generated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VizHit {
    pub id: String,
    pub raw_score: f64,
    pub norm_score: f64,
    pub doc: VizDocument,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GeneralResults {
    /// `design` when the query names chart types, else `exploratory`.
    pub mode: String,
    pub detected_chart_types: Vec<String>,
    /// Hits after facet filtering, before the result limit.
    pub total: usize,
    pub results: Vec<VizHit>,
    /// Counts over all `total` filtered hits.
    pub facets: FacetSummary,
}

/// Per-stage wall-clock time in milliseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Timings {
    pub parse: f64,
    pub classify: f64,
    pub qa: f64,
    pub general: f64,
    pub facets: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HybridResult {
    pub query: String,
    pub plan: SearchPlan,
    pub parsed: ParsedQuery,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qa: Option<QaAnswer>,
    pub general: GeneralResults,
    pub timings: Timings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AttributeSummary {
    pub name: String,
    pub data_type: DataType,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SourceSummary {
    pub id: String,
    pub name: String,
    pub description: String,
    pub row_count: usize,
    pub attributes: Vec<AttributeSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AttributeDetail {
    #[serde(flatten)]
    pub attribute: Attribute,
    /// Up to five distinct values of a dimension.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sample_values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SourceDetail {
    pub id: String,
    pub name: String,
    pub description: String,
    pub row_count: usize,
    pub attributes: Vec<AttributeDetail>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suggested_query: Option<String>,
}

/// Sample values listed per dimension in source details.
pub const SAMPLE_VALUES: usize = 5;

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1000.0
}

/// Immutable search engine over one snapshot of the corpora.
pub struct Engine {
    resources: Resources,
    settings: EngineSettings,
    parser: Parser,
    sources: Vec<DataSource>,
    catalogs: Vec<SourceCatalog>,
    source_index: SearchIndex,
    viz_docs: Vec<VizDocument>,
    viz_by_id: HashMap<String, usize>,
    viz_index: SearchIndex,
    generator: Option<Arc<dyn TextGenerator>>,
}

impl std::fmt::Debug for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Engine")
            .field("sources", &self.sources.len())
            .field("viz_docs", &self.viz_docs.len())
            .field("generator", &self.generator.is_some())
            .finish()
    }
}

/// Analyzer shared by both indices and the parser: the resource stopwords
/// plus the lexicon synonyms for index-time expansion.
pub fn analyzer_for(resources: &Resources) -> Analyzer {
    Analyzer { stopwords: resources.stopwords.clone(), ..Analyzer::default() }
        .with_synonyms(resources.lexicon.synonyms.clone())
}

impl Engine {
    /// Builds both indices from enriched sources and visualization records.
    pub fn build(
        resources: Resources,
        sources: Vec<DataSource>,
        viz_docs: Vec<VizDocument>,
        settings: EngineSettings,
    ) -> Result<Self, EngineError> {
        settings.bm25.validate()?;
        let analyzer = analyzer_for(&resources);
        let source_index = build_source_index(&sources, analyzer.clone(), settings.bm25)?;
        let viz_index = build_viz_index(&viz_docs, analyzer, settings.bm25)?;
        Self::with_indices(resources, sources, viz_docs, source_index, viz_index, settings)
    }

    /// Uses previously built indices; their ids must match the corpora.
    pub fn with_indices(
        resources: Resources,
        sources: Vec<DataSource>,
        viz_docs: Vec<VizDocument>,
        source_index: SearchIndex,
        viz_index: SearchIndex,
        settings: EngineSettings,
    ) -> Result<Self, EngineError> {
        let check = |name: &'static str, index: &SearchIndex, ids: BTreeSet<&str>| {
            let indexed: BTreeSet<&str> = index.ids().collect();
            if indexed != ids {
                let missing = ids.difference(&indexed).count();
                let extra = indexed.difference(&ids).count();
                return Err(EngineError::IndexMismatch {
                    name,
                    message: format!("{missing} documents missing, {extra} unexpected"),
                });
            }
            Ok(())
        };
        check("data sources", &source_index, sources.iter().map(|s| s.id.as_str()).collect())?;
        check("visualizations", &viz_index, viz_docs.iter().map(|d| d.id.as_str()).collect())?;

        let parser = Parser::new(&resources, source_index.analyzer().clone(), settings.matching);
        let catalogs = sources.iter().map(|s| parser.catalog(s)).collect();
        let viz_by_id = viz_docs.iter().enumerate().map(|(i, d)| (d.id.clone(), i)).collect();
        Ok(Self {
            resources,
            settings,
            parser,
            sources,
            catalogs,
            source_index,
            viz_docs,
            viz_by_id,
            viz_index,
            generator: None,
        })
    }

    pub fn with_generator(mut self, generator: Arc<dyn TextGenerator>) -> Self {
        self.generator = Some(generator);
        self
    }

    pub fn settings(&self) -> &EngineSettings {
        &self.settings
    }

    pub fn resources(&self) -> &Resources {
        &self.resources
    }

    pub fn sources(&self) -> &[DataSource] {
        &self.sources
    }

    pub fn source(&self, id: &str) -> Option<&DataSource> {
        self.sources.iter().find(|s| s.id == id)
    }

    pub fn viz_docs(&self) -> &[VizDocument] {
        &self.viz_docs
    }

    pub fn viz_doc(&self, id: &str) -> Option<&VizDocument> {
        self.viz_by_id.get(id).map(|&i| &self.viz_docs[i])
    }

    pub fn source_index(&self) -> &SearchIndex {
        &self.source_index
    }

    pub fn viz_index(&self) -> &SearchIndex {
        &self.viz_index
    }

    pub fn parse(&self, query: &str) -> ParsedQuery {
        self.parser.parse(query, &self.catalogs)
    }

    /// Runs the full pipeline for one request.
    pub fn search(&self, req: &SearchRequest) -> Result<HybridResult, EngineError> {
        let start = Instant::now();
        let mut timings = Timings::default();
        let pinned = match &req.source {
            Some(id) => Some(self.source(id).ok_or_else(|| EngineError::UnknownSource(id.clone()))?),
            None => None,
        };

        let t = Instant::now();
        let parsed = self.parse(&req.query);
        timings.parse = ms(t);

        let t = Instant::now();
        let thresholds = req.thresholds.unwrap_or(self.settings.thresholds);
        let plan = classify(&parsed, &self.source_index, thresholds);
        timings.classify = ms(t);

        let t = Instant::now();
        let target = pinned.or_else(|| {
            plan.invoke_qa.then(|| plan.top_source().and_then(|s| self.source(&s.source_id))).flatten()
        });
        let qa = target.map(|source| self.answer(&parsed, &plan, source, !req.no_generation));
        timings.qa = ms(t);

        let t = Instant::now();
        let (mode, detected, ranked) = self.general_search(&req.query);
        timings.general = ms(t);

        let t = Instant::now();
        let filtered = apply_facets(&ranked, |id| self.viz_doc(id), &req.facets);
        let facets = compute_facets(filtered.ids().filter_map(|id| self.viz_doc(id)));
        let limit = req.limit.unwrap_or(self.settings.result_limit);
        let results: Vec<VizHit> = filtered
            .entries
            .iter()
            .take(limit)
            .filter_map(|e| {
                Some(VizHit {
                    id: e.id.clone(),
                    raw_score: e.raw_score,
                    norm_score: e.norm_score,
                    doc: self.viz_doc(&e.id)?.clone(),
                })
            })
            .collect();
        timings.facets = ms(t);
        timings.total = ms(start);

        Ok(HybridResult {
            query: req.query.clone(),
            plan,
            parsed,
            qa,
            general: GeneralResults {
                mode: mode.to_string(),
                detected_chart_types: detected,
                total: filtered.len(),
                results,
                facets,
            },
            timings,
        })
    }

    /// All ranked pre-authored hits: design search when the query names a
    /// chart type, exploratory search otherwise.
    fn general_search(&self, query: &str) -> (&'static str, Vec<String>, RankedResults) {
        let tokens = self.viz_index.analyzer().encode(query);
        let detected: Vec<String> = self.resources.chart_types.detect(&tokens).into_iter().collect();
        let ranked = design_search(
            query,
            &self.viz_index,
            &self.resources.chart_types,
            usize::MAX,
            self.settings.design_mode,
        );
        (if detected.is_empty() { "exploratory" } else { "design" }, detected, ranked)
    }

    fn answer(&self, parsed: &ParsedQuery, plan: &SearchPlan, source: &DataSource, generate: bool) -> QaAnswer {
        let source_ranking = plan
            .ranked_sources
            .iter()
            .map(|s| SourceShare {
                source_id: s.source_id.clone(),
                name: self.source(&s.source_id).map(|d| d.name.clone()).unwrap_or_default(),
                percentage: s.norm_score * 100.0,
            })
            .collect();
        let mut answer = QaAnswer {
            source_id: source.id.clone(),
            source_ranking,
            spec: None,
            chart_spec: None,
            key_stats: None,
            summary_text: None,
            summary: None,
            suggestions: None,
            message: None,
        };
        let chart = resolve_spec(parsed, source).and_then(|spec| {
            answer.spec = Some(spec.clone());
            let table = execute_spec(&spec, source)?;
            choose_encoding(&spec, table)
        });
        match chart {
            Ok(mut chart) => {
                assign_geometry_set(&mut chart, &self.resources.gazetteer);
                let stats = compute_key_stats(&chart);
                let generator = self.generator.as_deref().filter(|_| generate);
                let summary = rephrase_summary(&stats, generator);
                answer.summary_text = Some(summary.text.clone());
                answer.summary = Some(summary);
                answer.key_stats = Some(stats);
                answer.chart_spec = Some(chart);
            }
            Err(e) => {
                if !matches!(e, QaError::SpecUnresolvable { .. }) {
                    tracing::info!(source = %source.id, error = %e, "no chart for query");
                }
                answer.message = Some(e.to_string());
                answer.suggestions = Some(suggest_queries(source, self.settings.suggestion_count));
            }
        }
        answer
    }

    pub fn source_summaries(&self) -> Vec<SourceSummary> {
        self.sources
            .iter()
            .map(|s| SourceSummary {
                id: s.id.clone(),
                name: s.name.clone(),
                description: s.description.clone(),
                row_count: s.row_count(),
                attributes: s
                    .attributes
                    .iter()
                    .map(|a| AttributeSummary {
                        name: a.name.clone(),
                        data_type: a.data_type,
                        role: a.role,
                    })
                    .collect(),
            })
            .collect()
    }

    pub fn source_detail(&self, id: &str) -> Option<SourceDetail> {
        let s = self.source(id)?;
        let attributes = s
            .attributes
            .iter()
            .enumerate()
            .map(|(i, a)| AttributeDetail {
                attribute: a.clone(),
                sample_values: if a.is_dimension() {
                    s.distinct_values(i).into_iter().take(SAMPLE_VALUES).collect()
                } else {
                    Vec::new()
                },
            })
            .collect();
        Some(SourceDetail {
            id: s.id.clone(),
            name: s.name.clone(),
            description: s.description.clone(),
            row_count: s.row_count(),
            attributes,
            suggested_query: suggest_queries(s, 1).into_iter().next(),
        })
    }
}
