//! Command-line front end for the `tdacpd` change point library: CSV
//! ingestion, configuration, detection, benchmark sweeps and plot data.

pub mod benchmark;
pub mod cli;
pub mod config;
pub mod detect;
mod error;
pub mod ingest;
pub mod output;
pub mod plot;

use serde::{Deserialize, Serialize};

pub use cli::{run, Cli};
pub use error::{CliError, Result};

/// Run record written as JSON next to the CSV outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Artifact {
    Detect(detect::DetectArtifact),
    Benchmark(benchmark::BenchmarkArtifact),
}
