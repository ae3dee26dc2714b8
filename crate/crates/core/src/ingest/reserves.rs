use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{parse_jsonl, read_text, write_jsonl, IngestError};
use crate::amount::{dec_str, Amount};
use crate::cpmm::PoolId;

/// Pool reserves at the END of `block`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReserveRecord {
    #[serde(with = "dec_str")]
    pub block: u64,
    pub pool_id: PoolId,
    #[serde(with = "dec_str")]
    pub reserve0: Amount,
    #[serde(with = "dec_str")]
    pub reserve1: Amount,
}

/// Parses reserve records, rejecting more than one record per `(block, pool)`.
/// The result is sorted by `(block, pool_id)`.
pub fn parse_reserves(source_name: &str, text: &str) -> Result<Vec<ReserveRecord>, IngestError> {
    let rows: Vec<(usize, ReserveRecord)> = parse_jsonl(source_name, text)?;
    let mut seen = BTreeMap::new();
    for (line, r) in &rows {
        if let Some(first) = seen.insert((r.block, r.pool_id.clone()), *line) {
            return Err(IngestError::Duplicate {
                source_name: source_name.to_string(),
                line: *line,
                key: format!("(block {}, pool {}) first seen on line {first}", r.block, r.pool_id),
            });
        }
    }
    let mut records: Vec<ReserveRecord> = rows.into_iter().map(|(_, r)| r).collect();
    records.sort_by(|a, b| (a.block, &a.pool_id).cmp(&(b.block, &b.pool_id)));
    Ok(records)
}

pub fn read_reserves(path: &Path) -> Result<Vec<ReserveRecord>, IngestError> {
    parse_reserves(&path.display().to_string(), &read_text(path)?)
}

pub fn write_reserves<W: Write>(w: W, records: &[ReserveRecord]) -> std::io::Result<()> {
    write_jsonl(w, records)
}
