//! File-based ingestion: swap events, end-of-block reserve records, daily USD
//! prices, block timestamps and the pool graph configuration.
//!
//! Every record file is UTF-8 JSON lines. Integers are written as decimal
//! strings so that 256-bit amounts survive tools limited to doubles.

mod calendar;
mod events;
mod graph;
mod prices;
mod reserves;
mod snapshots;
mod validate;

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

pub use calendar::{BlockCalendar, BlockTime};
pub use events::{filter_independent_swaps, parse_events, read_events, write_events, FilterOutcome, SwapEvent};
pub use graph::{parse_graph, read_graph, Network, PoolGraph, PoolInfo, DEFAULT_GRAPH_JSON};
pub use prices::{parse_prices, read_prices, PriceRow, PriceTable};
pub use reserves::{parse_reserves, read_reserves, write_reserves, ReserveRecord};
pub use snapshots::SnapshotProvider;
pub use validate::{validate_consistency, ClosureMismatch, ConsistencyFlag, ConsistencyReport};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{source_name}:{line}: field `{field}`: {message}")]
    Parse { source_name: String, line: usize, field: String, message: String },
    #[error("{source_name}:{line}: duplicate key {key}")]
    Duplicate { source_name: String, line: usize, key: String },
    #[error("{source_name}:{line}: {message}")]
    Invalid { source_name: String, line: usize, message: String },
    #[error("graph config: {0}")]
    Config(String),
}

impl IngestError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        IngestError::Io { path: path.to_path_buf(), source }
    }
}

/// Reads non-blank lines of a JSON-lines document, tagging each with its
/// 1-based line number.
pub(crate) fn parse_jsonl<T: DeserializeOwned>(source_name: &str, text: &str) -> Result<Vec<(usize, T)>, IngestError> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let de = &mut serde_json::Deserializer::from_str(line);
        let value: T = serde_path_to_error::deserialize(de).map_err(|e| {
            let field = e.path().to_string();
            IngestError::Parse {
                source_name: source_name.to_string(),
                line: line_no,
                field: if field == "." { "<record>".into() } else { field },
                message: e.inner().to_string(),
            }
        })?;
        out.push((line_no, value));
    }
    Ok(out)
}

pub(crate) fn read_text(path: &Path) -> Result<String, IngestError> {
    let file = File::open(path).map_err(|e| IngestError::io(path, e))?;
    let mut text = String::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| IngestError::io(path, e))?;
        text.push_str(&line);
        text.push('\n');
    }
    Ok(text)
}

/// Reads a JSON-lines file of any record type.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, IngestError> {
    let rows = parse_jsonl(&path.display().to_string(), &read_text(path)?)?;
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

/// Writes one compact JSON object per line.
pub fn write_jsonl<T: Serialize, W: Write>(mut w: W, rows: &[T]) -> std::io::Result<()> {
    for row in rows {
        serde_json::to_writer(&mut w, row)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}
