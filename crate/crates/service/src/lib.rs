//! Command-line and HTTP front end: configuration, index persistence, the
//! JSON API and a latency benchmark.

pub mod bench;
pub mod cli;
pub mod config;
pub mod http;
pub mod llm;
pub mod persist;

pub use config::Config;
pub use persist::ServiceError;
