//! Orchestration behind the `partavoid` binary: cache-aware counting runs,
//! containment queries, conjecture scans, bound audits, and graph
//! conversion. Every command writes a report and returns an [`Outcome`]
//! whose exit code the binary forwards.

pub mod commands;
pub mod counter;
pub mod report;

use std::path::PathBuf;

use thiserror::Error;

pub use commands::{
    cmd_bounds, cmd_check, cmd_conjectures, cmd_count, cmd_dacp, cmd_permeability, cmd_uniform,
    DacpDirection,
};
pub use counter::Counter;

/// Environment variable naming the default count cache.
pub const CACHE_ENV: &str = "PARTAVOID_CACHE";

pub const DEFAULT_ENUM_CEILING: usize = 13;
pub const DEFAULT_ORACLE_CEILING: usize = 10;
pub const MAX_ORACLE_CEILING: usize = 12;
pub const DEFAULT_MAX_ALL_K: usize = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("assertion failed: {0}")]
    Assertion(String),
    #[error("resource ceiling: {0}")]
    Resource(String),
    #[error(transparent)]
    Cache(#[from] partavoid::cache::CacheError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) | CliError::Cache(_) | CliError::Io(_) => 1,
            CliError::Assertion(_) => 2,
            CliError::Resource(_) => 3,
        }
    }
}

impl From<partavoid::ParseError> for CliError {
    fn from(e: partavoid::ParseError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

/// What a command found. Assertion failures ride along as findings so the
/// full report is still written before the process exits with status 2.
#[derive(Debug, Default)]
pub struct Outcome {
    pub findings: Vec<String>,
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.findings.is_empty() {
            0
        } else {
            2
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Which patterns a scan covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternSet {
    Explicit(Vec<partavoid::SetPartition>),
    /// Every partition of `[k]`.
    AllOfSize(usize),
}

impl PatternSet {
    pub fn resolve(&self, max_all_k: usize) -> Result<Vec<partavoid::SetPartition>, CliError> {
        match self {
            PatternSet::Explicit(v) => {
                if v.is_empty() {
                    return Err(CliError::Invalid("no patterns given".into()));
                }
                if let Some(t) = v.iter().find(|t| t.n() == 0) {
                    return Err(CliError::Invalid(format!("empty pattern {t:?}")));
                }
                Ok(v.clone())
            }
            PatternSet::AllOfSize(k) if *k > max_all_k => Err(CliError::Resource(format!(
                "all patterns of [{k}] exceeds the limit k <= {max_all_k}"
            ))),
            PatternSet::AllOfSize(0) => Err(CliError::Invalid("k must be positive".into())),
            PatternSet::AllOfSize(k) => Ok(partavoid::all_partitions(*k).collect()),
        }
    }
}

/// Shared settings for counting scans.
#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub patterns: PatternSet,
    pub n_from: usize,
    pub n_to: usize,
    pub enum_ceiling: usize,
    pub oracle_ceiling: usize,
    pub max_all_k: usize,
    pub force_oracle: bool,
    pub workers: usize,
    pub cache: Option<PathBuf>,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl ScanConfig {
    pub fn new(patterns: PatternSet, n_from: usize, n_to: usize) -> Self {
        ScanConfig {
            patterns,
            n_from,
            n_to,
            enum_ceiling: DEFAULT_ENUM_CEILING,
            oracle_ceiling: DEFAULT_ORACLE_CEILING,
            max_all_k: DEFAULT_MAX_ALL_K,
            force_oracle: false,
            workers: 1,
            cache: None,
            format: OutputFormat::Csv,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.n_from > self.n_to {
            return Err(CliError::Invalid(format!(
                "empty n range {}..={}",
                self.n_from, self.n_to
            )));
        }
        if self.workers == 0 {
            return Err(CliError::Invalid("worker count must be at least 1".into()));
        }
        if self.oracle_ceiling > MAX_ORACLE_CEILING {
            return Err(CliError::Invalid(format!(
                "oracle ceiling {} exceeds {MAX_ORACLE_CEILING}",
                self.oracle_ceiling
            )));
        }
        Ok(())
    }

    pub fn n_range(&self) -> std::ops::RangeInclusive<usize> {
        self.n_from..=self.n_to
    }
}
