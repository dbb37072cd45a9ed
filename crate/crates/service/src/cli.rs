use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::Context;
use chartseek_core::{Engine, SearchRequest};
use clap::{Parser, Subcommand};

use crate::bench::{self, BENCH_QUERIES};
use crate::config::Config;
use crate::http::{cors_layer, router};
use crate::llm::HttpGenerator;
use crate::persist::{open_engine, write_index};

/// Config file read when `--config` is not given, if present.
pub const DEFAULT_CONFIG: &str = "chartseek.toml";

#[derive(Debug, Parser)]
#[command(name = "chartseek", version, about = "Hybrid search over data sources and visualizations")]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Pre-authored results returned per query.
    #[arg(long, global = true)]
    pub limit: Option<usize>,
    /// Never call the text-generation endpoint.
    #[arg(long, global = true)]
    pub no_llm: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build and persist the data-source and visualization indices.
    Index,
    /// Answer one query and print the result as JSON.
    Query {
        text: String,
        /// Answer with this data source instead of the routed one.
        #[arg(long)]
        source: Option<String>,
    },
    /// Serve the HTTP API.
    Serve {
        /// Overrides `server.listen`.
        #[arg(long)]
        listen: Option<String>,
    },
    /// Measure end-to-end search latency through the HTTP router.
    Bench {
        #[arg(long, default_value_t = 20)]
        iterations: usize,
        /// Exit with status 1 when the p95 latency exceeds this budget.
        #[arg(long, default_value_t = 100.0)]
        budget_ms: f64,
    },
}

/// Reads the configuration named on the command line, else
/// `chartseek.toml` in the working directory, else the defaults.
pub fn load_config(cli: &Cli) -> anyhow::Result<Config> {
    let mut config = match &cli.config {
        Some(path) => Config::load(path)?,
        None if Path::new(DEFAULT_CONFIG).exists() => Config::load(Path::new(DEFAULT_CONFIG))?,
        None => Config::default(),
    };
    config.apply_env();
    if let Some(limit) = cli.limit {
        config.search.result_limit = limit;
    }
    if cli.no_llm {
        config.llm.enabled = false;
    }
    if let Command::Serve { listen: Some(addr) } = &cli.command {
        config.server.listen = addr.clone();
    }
    config.validate()?;
    Ok(config)
}

fn engine_with_generator(config: &Config) -> anyhow::Result<Engine> {
    let engine = open_engine(config)?;
    Ok(match HttpGenerator::from_config(&config.llm).context("cannot create the text-generation client")? {
        Some(g) => engine.with_generator(Arc::new(g)),
        None => engine,
    })
}

fn runtime() -> anyhow::Result<tokio::runtime::Runtime> {
    tokio::runtime::Builder::new_multi_thread().enable_all().build().context("cannot start the async runtime")
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    let config = load_config(&cli)?;
    match cli.command {
        Command::Index => {
            let manifest = write_index(&config)?;
            tracing::info!(
                sources = manifest.sources.doc_cnt,
                visualizations = manifest.visualizations.doc_cnt,
                dir = %config.corpus.index_dir.display(),
                "indices written"
            );
            println!("{}", serde_json::to_string_pretty(&manifest)?);
        }
        Command::Query { text, source } => {
            let engine = engine_with_generator(&config)?;
            let req = SearchRequest { source, ..SearchRequest::new(text) };
            let result = engine.search(&req)?;
            let mut out = std::io::stdout().lock();
            serde_json::to_writer_pretty(&mut out, &result)?;
            writeln!(out)?;
        }
        Command::Serve { .. } => {
            let engine = Arc::new(engine_with_generator(&config)?);
            let addr = config.server.listen_addr()?;
            let app = router(engine, cors_layer(&config.server.cors_origins));
            runtime()?.block_on(async move {
                let listener =
                    tokio::net::TcpListener::bind(addr).await.with_context(|| format!("cannot listen on {addr}"))?;
                tracing::info!(%addr, "serving");
                axum::serve(listener, app)
                    .with_graceful_shutdown(async {
                        let _ = tokio::signal::ctrl_c().await;
                    })
                    .await
                    .context("server failed")
            })?;
        }
        Command::Bench { iterations, budget_ms } => {
            let engine = Arc::new(engine_with_generator(&config)?);
            let app = router(engine, cors_layer(&config.server.cors_origins));
            let report = runtime()?.block_on(bench::run(&app, BENCH_QUERIES, iterations));
            println!("{}", serde_json::to_string_pretty(&report)?);
            if report.p95_ms > budget_ms {
                anyhow::bail!("p95 latency {:.2} ms exceeds the {budget_ms} ms budget", report.p95_ms);
            }
        }
    }
    Ok(())
}
