use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QueryError {
    #[error("query must be non-empty")]
    EmptyQuery,
    #[error("k must be at least 1")]
    InvalidK,
    #[error("item id {0} is outside the item dictionary")]
    UnknownItemId(u32),
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("invalid synthetic parameters: {0}")]
    InvalidParams(String),
    #[error("workload infeasible: no transaction has at least {length} items")]
    WorkloadInfeasible { length: usize },
    #[error("query length must be at least 1")]
    InvalidQueryLength,
    #[error("database is empty")]
    EmptyDatabase,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed json-lines row {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("malformed tsv row {line}: {reason}")]
    Tsv { line: usize, reason: String },
    #[error("token {0:?} cannot be represented in a tsv report")]
    UnrepresentableToken(String),
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("at least one engine must be selected")]
    NoEngines,
    #[error("query lengths must be non-empty and at least 1")]
    InvalidLengths,
    #[error("scale multipliers must be at least 1")]
    InvalidMultiplier,
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Mismatch(Box<Mismatch>),
}

/// Reproducer for two engines disagreeing on one query.
#[derive(Debug, Error)]
#[error(
    "engines disagree: {reference} vs {engine} on query {query:?} (k={k}, seed={seed}); \
     expected {expected}, got {actual}"
)]
pub struct Mismatch {
    pub reference: String,
    pub engine: String,
    pub query: Vec<String>,
    pub k: usize,
    pub seed: u64,
    pub expected: String,
    pub actual: String,
}
