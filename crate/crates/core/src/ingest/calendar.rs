use std::collections::BTreeMap;
use std::path::Path;

use chrono::{DateTime, NaiveDate};
use serde::{Deserialize, Serialize};

use super::{parse_jsonl, read_text, IngestError};
use crate::amount::dec_str;

/// One line of the block timestamps file (unix seconds, UTC).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockTime {
    #[serde(with = "dec_str")]
    pub block: u64,
    #[serde(with = "dec_str")]
    pub timestamp: u64,
}

/// Maps blocks to UTC days.
///
/// A block between two recorded checkpoints inherits the day of the closest
/// earlier checkpoint; blocks outside `[first, last]` are unmapped.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BlockCalendar {
    checkpoints: BTreeMap<u64, NaiveDate>,
}

impl BlockCalendar {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_times(times: impl IntoIterator<Item = BlockTime>) -> Result<Self, String> {
        let mut cal = BlockCalendar::new();
        for t in times {
            cal.insert_timestamp(t.block, t.timestamp)?;
        }
        Ok(cal)
    }

    pub fn insert_timestamp(&mut self, block: u64, timestamp: u64) -> Result<(), String> {
        let secs = i64::try_from(timestamp).map_err(|_| format!("timestamp {timestamp} out of range"))?;
        let day = DateTime::from_timestamp(secs, 0)
            .ok_or_else(|| format!("timestamp {timestamp} out of range"))?
            .date_naive();
        self.insert_day(block, day);
        Ok(())
    }

    pub fn insert_day(&mut self, block: u64, day: NaiveDate) {
        self.checkpoints.insert(block, day);
    }

    pub fn day_of(&self, block: u64) -> Option<NaiveDate> {
        let (&last, _) = self.checkpoints.last_key_value()?;
        if block > last {
            return None;
        }
        self.checkpoints.range(..=block).next_back().map(|(_, d)| *d)
    }

    pub fn first_block(&self) -> Option<u64> {
        self.checkpoints.keys().next().copied()
    }

    pub fn last_block(&self) -> Option<u64> {
        self.checkpoints.keys().next_back().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.checkpoints.is_empty()
    }

    pub fn parse(source_name: &str, text: &str) -> Result<Self, IngestError> {
        let rows: Vec<(usize, BlockTime)> = parse_jsonl(source_name, text)?;
        let mut cal = BlockCalendar::new();
        let mut last_ts: Option<(u64, u64)> = None;
        let mut sorted = rows;
        sorted.sort_by_key(|(_, t)| t.block);
        for (line, t) in sorted {
            if cal.checkpoints.contains_key(&t.block) {
                return Err(IngestError::Duplicate {
                    source_name: source_name.to_string(),
                    line,
                    key: format!("block {}", t.block),
                });
            }
            if let Some((b, ts)) = last_ts {
                if t.timestamp < ts {
                    return Err(IngestError::Invalid {
                        source_name: source_name.to_string(),
                        line,
                        message: format!("timestamp of block {} precedes block {b}", t.block),
                    });
                }
            }
            cal.insert_timestamp(t.block, t.timestamp)
                .map_err(|message| IngestError::Invalid { source_name: source_name.to_string(), line, message })?;
            last_ts = Some((t.block, t.timestamp));
        }
        Ok(cal)
    }

    pub fn read(path: &Path) -> Result<Self, IngestError> {
        Self::parse(&path.display().to_string(), &read_text(path)?)
    }
}
