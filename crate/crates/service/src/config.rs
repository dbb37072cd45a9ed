use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Duration;

use chartseek_core::classifier::Thresholds;
use chartseek_core::index::{Analyzer, Bm25Params};
use chartseek_core::parser::MatchSettings;
use chartseek_core::vizsearch::DesignMode;
use chartseek_core::EngineSettings;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Environment variable that overrides `llm.api_key`.
pub const API_KEY_ENV: &str = "CHARTSEEK_LLM_API_KEY";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config file {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid config value {key}: {message}")]
    Invalid { key: &'static str, message: String },
}

impl ConfigError {
    fn invalid(key: &'static str, message: impl Into<String>) -> Self {
        Self::Invalid { key, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusConfig {
    /// Directory of `<id>.csv` files with optional `<id>.meta.json` metadata.
    pub sources: PathBuf,
    /// Newline-delimited JSON visualization records.
    pub visualizations: PathBuf,
    /// Directory overriding the bundled stopwords, lexicon, grammar, chart
    /// types and gazetteer; absent files keep the bundled copy.
    pub resources: Option<PathBuf>,
    /// Where `index` writes and `query`/`serve` read the persisted indices.
    pub index_dir: PathBuf,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            sources: "data/sources".into(),
            visualizations: "data/viz_corpus.jsonl".into(),
            resources: None,
            index_dir: "index".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzerConfig {
    pub max_ngram: usize,
    pub fuzzy_threshold: f64,
    pub taxonomy_threshold: f64,
    pub related_score: f64,
}

impl Default for AnalyzerConfig {
    fn default() -> Self {
        let m = MatchSettings::default();
        Self {
            max_ngram: 3,
            fuzzy_threshold: m.fuzzy_threshold,
            taxonomy_threshold: m.taxonomy_threshold,
            related_score: m.related_score,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Bm25Config {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Config {
    fn default() -> Self {
        let p = Bm25Params::default();
        Self { k1: p.k1, b: p.b }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    pub field_match: usize,
    pub norm_match: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        let t = Thresholds::default();
        Self { field_match: t.field_match, norm_match: t.norm_match }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub result_limit: usize,
    pub design_mode: DesignMode,
    pub suggestion_count: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        let s = EngineSettings::default();
        Self { result_limit: s.result_limit, design_mode: s.design_mode, suggestion_count: s.suggestion_count }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LlmConfig {
    pub enabled: bool,
    pub endpoint: Option<String>,
    pub model: Option<String>,
    pub api_key: Option<String>,
    pub timeout_secs: f64,
}

impl Default for LlmConfig {
    fn default() -> Self {
        Self { enabled: false, endpoint: None, model: None, api_key: None, timeout_secs: 10.0 }
    }
}

impl LlmConfig {
    pub fn timeout(&self) -> Duration {
        Duration::from_secs_f64(self.timeout_secs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServerConfig {
    pub listen: String,
    /// Origins allowed to call the API from a browser; `*` allows any.
    pub cors_origins: Vec<String>,
}

impl Default for ServerConfig {
    fn default() -> Self {
        Self { listen: "127.0.0.1:8080".into(), cors_origins: vec!["*".into()] }
    }
}

impl ServerConfig {
    pub fn listen_addr(&self) -> Result<SocketAddr, ConfigError> {
        self.listen.parse().map_err(|e| ConfigError::invalid("server.listen", format!("{:?}: {e}", self.listen)))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub corpus: CorpusConfig,
    pub analyzer: AnalyzerConfig,
    pub bm25: Bm25Config,
    pub classifier: ClassifierConfig,
    pub search: SearchConfig,
    pub llm: LlmConfig,
    pub server: ServerConfig,
}

impl Config {
    /// Reads and validates a TOML file. Relative corpus paths are resolved
    /// against the file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        let mut config = Self::from_toml(&text).map_err(|e| match e {
            ConfigError::Parse { message, .. } => ConfigError::Parse { path: path.into(), message },
            other => other,
        })?;
        config.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        Ok(config)
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: Self =
            toml::from_str(text).map_err(|e| ConfigError::Parse { path: PathBuf::new(), message: e.to_string() })?;
        config.validate()?;
        Ok(config)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut self.corpus.sources);
        resolve(&mut self.corpus.visualizations);
        resolve(&mut self.corpus.index_dir);
        if let Some(r) = &mut self.corpus.resources {
            resolve(r);
        }
    }

    /// Takes the API key from the environment when the variable is set.
    pub fn apply_env(&mut self) {
        if let Ok(key) = std::env::var(API_KEY_ENV) {
            if !key.is_empty() {
                self.llm.api_key = Some(key);
            }
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let a = &self.analyzer;
        if !(1..=5).contains(&a.max_ngram) {
            return Err(ConfigError::invalid("analyzer.max_ngram", "must be between 1 and 5"));
        }
        for (key, v) in [
            ("analyzer.fuzzy_threshold", a.fuzzy_threshold),
            ("analyzer.taxonomy_threshold", a.taxonomy_threshold),
            ("analyzer.related_score", a.related_score),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(ConfigError::invalid(key, format!("{v} is outside [0, 1]")));
            }
        }
        Bm25Params::new(self.bm25.k1, self.bm25.b).map_err(|e| ConfigError::invalid("bm25", e.to_string()))?;
        if self.classifier.field_match == 0 {
            return Err(ConfigError::invalid("classifier.field_match", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.classifier.norm_match) {
            return Err(ConfigError::invalid("classifier.norm_match", "must be within [0, 1]"));
        }
        if self.search.result_limit == 0 {
            return Err(ConfigError::invalid("search.result_limit", "must be at least 1"));
        }
        if self.llm.enabled {
            match &self.llm.endpoint {
                None => return Err(ConfigError::invalid("llm.endpoint", "required when llm.enabled is true")),
                Some(e) if !(e.starts_with("http://") || e.starts_with("https://")) => {
                    return Err(ConfigError::invalid("llm.endpoint", format!("{e:?} is not an http(s) URL")));
                }
                _ => {}
            }
        }
        if !(self.llm.timeout_secs.is_finite() && self.llm.timeout_secs > 0.0) {
            return Err(ConfigError::invalid("llm.timeout_secs", "must be positive"));
        }
        self.server.listen_addr()?;
        Ok(())
    }

    pub fn engine_settings(&self) -> EngineSettings {
        EngineSettings {
            bm25: self.bm25_params(),
            thresholds: Thresholds {
                field_match: self.classifier.field_match,
                norm_match: self.classifier.norm_match,
            },
            matching: MatchSettings {
                fuzzy_threshold: self.analyzer.fuzzy_threshold,
                taxonomy_threshold: self.analyzer.taxonomy_threshold,
                related_score: self.analyzer.related_score,
                ..MatchSettings::default()
            },
            result_limit: self.search.result_limit,
            design_mode: self.search.design_mode,
            suggestion_count: self.search.suggestion_count,
        }
    }

    pub fn bm25_params(&self) -> Bm25Params {
        Bm25Params { k1: self.bm25.k1, b: self.bm25.b }
    }

    /// Applies the analyzer settings to a resource-derived analyzer.
    pub fn configure_analyzer(&self, base: Analyzer) -> Analyzer {
        Analyzer { max_ngram: self.analyzer.max_ngram, fuzzy_threshold: self.analyzer.fuzzy_threshold, ..base }
    }

    /// Digest of the settings that shape the persisted indices.
    pub fn index_hash(&self) -> String {
        let relevant = serde_json::json!({
            "analyzer": { "maxNgram": self.analyzer.max_ngram, "fuzzyThreshold": self.analyzer.fuzzy_threshold },
            "bm25": { "k1": self.bm25.k1, "b": self.bm25.b },
        });
        hex::encode(Sha256::digest(relevant.to_string().as_bytes()))
    }
}
