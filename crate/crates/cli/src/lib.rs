//! Configuration-driven batch pipeline over the skillscape metrics.

pub mod config;
pub mod pipeline;
pub mod report;
pub mod stages;
pub mod tables;

use std::path::PathBuf;

use thiserror::Error;

pub use config::PipelineConfig;
pub use pipeline::{Manifest, Pipeline, RunSummary, Stage};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed artifact: {0}")]
    Artifact(String),
    #[error("stage `{stage}` failed: {message}")]
    Stage { stage: String, message: String },
    #[error(transparent)]
    Ingest(#[from] skillscape_core::ingest::IngestError),
    #[error(transparent)]
    Delineation(#[from] skillscape_core::delineation::DelineationError),
    #[error(transparent)]
    Complexity(#[from] skillscape_core::complexity::ComplexityError),
    #[error(transparent)]
    Relatedness(#[from] skillscape_core::relatedness::RelatednessError),
    #[error(transparent)]
    Stack(#[from] skillscape_core::yearly::StackError),
    #[error(transparent)]
    Econ(#[from] skillscape_core::econometrics::EconError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl PipelineError {
    /// Short machine-readable error category.
    pub fn kind(&self) -> &'static str {
        match self {
            PipelineError::Config(_) => "config",
            PipelineError::Io { .. } => "io",
            PipelineError::Artifact(_) => "artifact",
            PipelineError::Stage { .. } => "stage",
            PipelineError::Ingest(_) => "ingest",
            PipelineError::Delineation(_) => "delineation",
            PipelineError::Complexity(_) => "complexity",
            PipelineError::Relatedness(_) => "relatedness",
            PipelineError::Stack(_) => "metrics",
            PipelineError::Econ(_) => "econometrics",
            PipelineError::Csv(_) => "csv",
            PipelineError::Json(_) => "json",
        }
    }
}

/// Runs every stage for the configuration.
pub fn run_pipeline(cfg: PipelineConfig) -> Result<RunSummary, PipelineError> {
    Pipeline::new(cfg)?.run(&[Stage::Report])
}
