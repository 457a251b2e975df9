//! Deterministic fact-graph builder: dump ingestion, the build pipeline,
//! the sharded release writer, pointer validation, diagnostics and the
//! benchmark generator. The pure algorithmic core lives in
//! `factforge-core`; this crate owns IO, file formats and orchestration.

pub mod bench_io;
pub mod build;
pub mod config;
pub mod defaults;
pub mod fixture;
pub mod ingest;
pub mod manifest;
pub mod release_io;
pub mod statsio;
pub mod validate;

/// Tool version recorded in every manifest.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable overriding the output root.
pub const OUT_ENV: &str = "FACTFORGE_OUT";
