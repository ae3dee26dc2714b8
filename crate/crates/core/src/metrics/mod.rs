//! Aggregate statistics, daily series and report files.

mod report;
mod series;
mod stats;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use report::{build_report, emit_report, DailySummary, Report, ReportInputs, ReportThresholds, SCHEMA_VERSION};
pub use series::{daily_arb_blocks, daily_price_movement, pearson, pearson_pairs, price_movement, DailySeries};
pub use stats::{
    arb_stats, gain_stats, gain_stats_of, path_distribution, routing_summary, ArbStats, GainReport, GainStats,
    PathHistogram, RoutingSummary,
};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("{0}")]
    Domain(String),
    #[error("block {0} has no day in the block calendar")]
    UnmappedBlock(u64),
    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Csv { path: PathBuf, message: String },
}

impl MetricsError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        MetricsError::Io { path: path.to_path_buf(), source }
    }
}
