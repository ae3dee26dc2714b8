use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

/// Profitable cycle keys at one block. `None` marks a block that could not
/// be scanned; it ends every open run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockKeys {
    pub block: u64,
    pub keys: Option<BTreeSet<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpportunityRun {
    pub canonical_key: String,
    pub start_block: u64,
    pub end_block: u64,
    pub duration_blocks: u64,
}

impl OpportunityRun {
    fn new(canonical_key: String, start_block: u64, end_block: u64) -> Self {
        OpportunityRun { canonical_key, start_block, end_block, duration_blocks: end_block - start_block + 1 }
    }
}

/// Maximal runs of consecutive blocks in which the same cycle stays
/// profitable. A gap in block numbers, or an unscanned block, ends a run.
/// Sorted by start block, then key.
pub fn track_durations(scans: &[BlockKeys]) -> Vec<OpportunityRun> {
    let mut order: Vec<&BlockKeys> = scans.iter().collect();
    order.sort_by_key(|s| s.block);

    let mut runs = Vec::new();
    let mut open: BTreeMap<String, u64> = BTreeMap::new();
    let mut prev: Option<u64> = None;
    for scan in order {
        let contiguous = prev.is_some_and(|p| p + 1 == scan.block);
        if !contiguous {
            if let Some(p) = prev {
                runs.extend(std::mem::take(&mut open).into_iter().map(|(k, s)| OpportunityRun::new(k, s, p)));
            }
        }
        let present = scan.keys.clone().unwrap_or_default();
        let closed: Vec<String> = open.keys().filter(|k| !present.contains(*k)).cloned().collect();
        for k in closed {
            let start = open.remove(&k).unwrap_or(scan.block);
            // `prev` is set here: `open` is empty whenever the scan is not contiguous.
            runs.push(OpportunityRun::new(k, start, prev.unwrap_or(scan.block)));
        }
        for k in present {
            open.entry(k).or_insert(scan.block);
        }
        prev = Some(scan.block);
    }
    if let Some(p) = prev {
        runs.extend(open.into_iter().map(|(k, s)| OpportunityRun::new(k, s, p)));
    }
    runs.sort_by(|a, b| (a.start_block, &a.canonical_key).cmp(&(b.start_block, &b.canonical_key)));
    runs
}

pub fn mean_duration(runs: &[OpportunityRun]) -> Option<f64> {
    if runs.is_empty() {
        return None;
    }
    Some(runs.iter().map(|r| r.duration_blocks as f64).sum::<f64>() / runs.len() as f64)
}
