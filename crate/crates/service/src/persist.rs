use std::path::{Path, PathBuf};

use chartseek_core::classifier::build_source_index;
use chartseek_core::corpus::{load_source_dir, load_viz_corpus, CorpusError, DataSource, VizDocument};
use chartseek_core::engine::analyzer_for;
use chartseek_core::index::{IndexError, SearchIndex};
use chartseek_core::resources::ResourceError;
use chartseek_core::vizsearch::build_viz_index;
use chartseek_core::{Engine, EngineError, Resources};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::Config;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SOURCE_INDEX_FILE: &str = "sources.index.json";
pub const VIZ_INDEX_FILE: &str = "visualizations.index.json";
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error("{what} not found: {}", path.display())]
    MissingPath { what: &'static str, path: PathBuf },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Resources(#[from] ResourceError),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("no index found in directory {}; run `chartseek index` first", dir.display())]
    MissingIndex { dir: PathBuf },
    #[error("index in {} is out of date ({reason}); run `chartseek index` again", dir.display())]
    StaleIndex { dir: PathBuf, reason: String },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid manifest {}: {message}", path.display())]
    Manifest { path: PathBuf, message: String },
}

/// Everything loaded from the configured corpus paths.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub resources: Resources,
    pub sources: Vec<DataSource>,
    pub viz_docs: Vec<VizDocument>,
    /// Digest of every input file, in path order.
    pub checksum: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IndexEntry {
    pub file: String,
    pub doc_cnt: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Manifest {
    pub version: u32,
    pub config_hash: String,
    pub corpus_sha256: String,
    pub sources: IndexEntry,
    pub visualizations: IndexEntry,
}

fn require(what: &'static str, path: &Path) -> Result<(), ServiceError> {
    if path.exists() {
        Ok(())
    } else {
        Err(ServiceError::MissingPath { what, path: path.to_path_buf() })
    }
}

fn read(path: &Path) -> Result<Vec<u8>, ServiceError> {
    std::fs::read(path).map_err(|source| ServiceError::Read { path: path.to_path_buf(), source })
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), ServiceError> {
    // write-then-rename so readers never see a partial file
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)
        .and_then(|_| std::fs::rename(&tmp, path))
        .map_err(|source| ServiceError::Write { path: path.to_path_buf(), source })
}

fn sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn files_in(dir: &Path) -> Result<Vec<PathBuf>, ServiceError> {
    let entries = std::fs::read_dir(dir).map_err(|source| ServiceError::Read { path: dir.to_path_buf(), source })?;
    let mut files: Vec<PathBuf> = entries.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.is_file()).collect();
    files.sort();
    Ok(files)
}

fn corpus_checksum(config: &Config) -> Result<String, ServiceError> {
    let mut files = files_in(&config.corpus.sources)?;
    files.push(config.corpus.visualizations.clone());
    if let Some(dir) = &config.corpus.resources {
        files.extend(files_in(dir)?);
    }
    let mut hasher = Sha256::new();
    for f in files {
        let name = f.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        hasher.update(name.as_bytes());
        hasher.update([0]);
        hasher.update(read(&f)?);
        hasher.update([0]);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// Loads resources, data sources and visualization records.
pub fn load_corpus(config: &Config) -> Result<Corpus, ServiceError> {
    require("data source directory", &config.corpus.sources)?;
    require("visualization corpus", &config.corpus.visualizations)?;
    let resources = match &config.corpus.resources {
        Some(dir) => {
            require("resource directory", dir)?;
            Resources::load_dir(dir)?
        }
        None => Resources::bundled(),
    };
    let sources = load_source_dir(&config.corpus.sources, &resources.gazetteer, &resources.lexicon)?;
    let viz = load_viz_corpus(&config.corpus.visualizations, Some(&resources.chart_types.id_set()))?;
    for d in &viz.diagnostics {
        tracing::warn!(line = d.line, message = %d.message, "skipped visualization record");
    }
    let checksum = corpus_checksum(config)?;
    Ok(Corpus { resources, sources, viz_docs: viz.docs, checksum })
}

/// Builds the data-source and visualization indices.
pub fn build_indices(config: &Config, corpus: &Corpus) -> Result<(SearchIndex, SearchIndex), ServiceError> {
    let analyzer = config.configure_analyzer(analyzer_for(&corpus.resources));
    let params = config.bm25_params();
    let source_index = build_source_index(&corpus.sources, analyzer.clone(), params)?;
    let viz_index = build_viz_index(&corpus.viz_docs, analyzer, params)?;
    Ok((source_index, viz_index))
}

/// Builds both indices from the corpus and writes them with a manifest.
pub fn write_index(config: &Config) -> Result<Manifest, ServiceError> {
    let corpus = load_corpus(config)?;
    let (source_index, viz_index) = build_indices(config, &corpus)?;
    let dir = &config.corpus.index_dir;
    std::fs::create_dir_all(dir).map_err(|source| ServiceError::Write { path: dir.clone(), source })?;
    let entry = |file: &str, index: &SearchIndex| -> Result<IndexEntry, ServiceError> {
        let bytes = index.to_json();
        write(&dir.join(file), &bytes)?;
        Ok(IndexEntry { file: file.to_string(), doc_cnt: index.doc_count(), sha256: sha256(&bytes) })
    };
    let manifest = Manifest {
        version: MANIFEST_VERSION,
        config_hash: config.index_hash(),
        corpus_sha256: corpus.checksum.clone(),
        sources: entry(SOURCE_INDEX_FILE, &source_index)?,
        visualizations: entry(VIZ_INDEX_FILE, &viz_index)?,
    };
    let json = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    write(&dir.join(MANIFEST_FILE), &json)?;
    Ok(manifest)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest, ServiceError> {
    let path = dir.join(MANIFEST_FILE);
    if !path.exists() {
        return Err(ServiceError::MissingIndex { dir: dir.to_path_buf() });
    }
    let manifest: Manifest = serde_json::from_slice(&read(&path)?)
        .map_err(|e| ServiceError::Manifest { path: path.clone(), message: e.to_string() })?;
    if manifest.version != MANIFEST_VERSION {
        return Err(ServiceError::Manifest { path, message: format!("unsupported version {}", manifest.version) });
    }
    Ok(manifest)
}

fn load_checked(dir: &Path, entry: &IndexEntry) -> Result<SearchIndex, ServiceError> {
    let path = dir.join(&entry.file);
    if !path.exists() {
        return Err(ServiceError::MissingIndex { dir: dir.to_path_buf() });
    }
    let bytes = read(&path)?;
    if sha256(&bytes) != entry.sha256 {
        return Err(ServiceError::StaleIndex {
            dir: dir.to_path_buf(),
            reason: format!("{} does not match its manifest checksum", entry.file),
        });
    }
    Ok(SearchIndex::from_json(&bytes)?)
}

/// Opens an engine over the persisted indices, refusing indices built from
/// a different corpus or with different index settings.
pub fn open_engine(config: &Config) -> Result<Engine, ServiceError> {
    let dir = &config.corpus.index_dir;
    let manifest = read_manifest(dir)?;
    let corpus = load_corpus(config)?;
    let stale = |reason: &str| ServiceError::StaleIndex { dir: dir.clone(), reason: reason.to_string() };
    if manifest.config_hash != config.index_hash() {
        return Err(stale("index settings changed"));
    }
    if manifest.corpus_sha256 != corpus.checksum {
        return Err(stale("corpus files changed"));
    }
    let source_index = load_checked(dir, &manifest.sources)?;
    let viz_index = load_checked(dir, &manifest.visualizations)?;
    Ok(Engine::with_indices(
        corpus.resources,
        corpus.sources,
        corpus.viz_docs,
        source_index,
        viz_index,
        config.engine_settings(),
    )?)
}

/// Builds an engine directly from the corpus without touching the disk
/// index.
pub fn build_engine(config: &Config) -> Result<Engine, ServiceError> {
    let corpus = load_corpus(config)?;
    let (source_index, viz_index) = build_indices(config, &corpus)?;
    Ok(Engine::with_indices(
        corpus.resources,
        corpus.sources,
        corpus.viz_docs,
        source_index,
        viz_index,
        config.engine_settings(),
    )?)
}
