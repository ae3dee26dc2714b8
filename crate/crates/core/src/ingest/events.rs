use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{parse_jsonl, read_text, write_jsonl, IngestError};
use crate::amount::{dec_str, Amount};
use crate::cpmm::PoolId;

/// One swap as recorded on chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwapEvent {
    #[serde(with = "dec_str")]
    pub block: u64,
    pub tx_hash: String,
    #[serde(with = "dec_str")]
    pub tx_index: u64,
    #[serde(with = "dec_str")]
    pub log_index: u64,
    pub pool_id: PoolId,
    pub token_in: String,
    pub token_out: String,
    #[serde(with = "dec_str")]
    pub amount_in: Amount,
    #[serde(with = "dec_str")]
    pub amount_out: Amount,
    /// Swap value in USD as reported by an indexer, when available.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub usd_value: Option<f64>,
}

impl SwapEvent {
    pub fn ordering_key(&self) -> (u64, u64, u64) {
        (self.block, self.tx_index, self.log_index)
    }
}

/// Parses and validates an events document; the result is sorted by
/// `(block, tx_index, log_index)`.
pub fn parse_events(source_name: &str, text: &str) -> Result<Vec<SwapEvent>, IngestError> {
    let rows: Vec<(usize, SwapEvent)> = parse_jsonl(source_name, text)?;
    let mut seen = BTreeMap::new();
    for (line, ev) in &rows {
        let invalid = |message: String| IngestError::Invalid { source_name: source_name.to_string(), line: *line, message };
        if ev.amount_in.is_zero() {
            return Err(invalid("amount_in must be positive".into()));
        }
        if ev.token_in == ev.token_out {
            return Err(invalid(format!("token_in equals token_out ({})", ev.token_in)));
        }
        if ev.token_in.is_empty() || ev.token_out.is_empty() || ev.tx_hash.is_empty() {
            return Err(invalid("empty token or tx_hash".into()));
        }
        if let Some(v) = ev.usd_value {
            if !v.is_finite() || v < 0.0 {
                return Err(invalid(format!("usd_value {v} must be finite and non-negative")));
            }
        }
        if let Some(first) = seen.insert(ev.ordering_key(), *line) {
            return Err(IngestError::Duplicate {
                source_name: source_name.to_string(),
                line: *line,
                key: format!(
                    "(block {}, tx_index {}, log_index {}) first seen on line {first}",
                    ev.block, ev.tx_index, ev.log_index
                ),
            });
        }
    }
    let mut events: Vec<SwapEvent> = rows.into_iter().map(|(_, e)| e).collect();
    events.sort_by_key(|e| e.ordering_key());
    Ok(events)
}

pub fn read_events(path: &Path) -> Result<Vec<SwapEvent>, IngestError> {
    parse_events(&path.display().to_string(), &read_text(path)?)
}

pub fn write_events<W: Write>(w: W, events: &[SwapEvent]) -> std::io::Result<()> {
    write_jsonl(w, events)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FilterOutcome {
    pub kept: Vec<SwapEvent>,
    pub dropped: usize,
}

/// Drops every swap belonging to a transaction that contains more than one
/// swap; such swaps may already be legs of a deliberate routing.
pub fn filter_independent_swaps(events: &[SwapEvent]) -> FilterOutcome {
    let mut per_tx: BTreeMap<&str, usize> = BTreeMap::new();
    for e in events {
        *per_tx.entry(e.tx_hash.as_str()).or_default() += 1;
    }
    let multi: BTreeSet<&str> = per_tx.into_iter().filter(|(_, n)| *n > 1).map(|(h, _)| h).collect();
    let kept: Vec<SwapEvent> = events.iter().filter(|e| !multi.contains(e.tx_hash.as_str())).cloned().collect();
    FilterOutcome { dropped: events.len() - kept.len(), kept }
}
