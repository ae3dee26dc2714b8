use std::collections::BTreeMap;

use super::{PoolGraph, ReserveRecord};
use crate::amount::Amount;
use crate::cpmm::PoolId;
use crate::snapshot::BlockSnapshot;

/// Beginning-of-block pool state derived from end-of-block reserve records.
///
/// The snapshot for block `n` holds, per pool, the latest record at a block
/// strictly below `n`. Pools with no such record are absent (unavailable).
#[derive(Clone, Debug)]
pub struct SnapshotProvider {
    graph: PoolGraph,
    history: BTreeMap<PoolId, Vec<(u64, Amount, Amount)>>,
    ignored_records: usize,
}

impl SnapshotProvider {
    /// Records for pools unknown to `graph` are ignored and counted.
    pub fn build(records: &[ReserveRecord], graph: &PoolGraph) -> Self {
        let mut history: BTreeMap<PoolId, Vec<(u64, Amount, Amount)>> = BTreeMap::new();
        let mut ignored = 0;
        for r in records {
            if graph.pool(&r.pool_id).is_none() {
                ignored += 1;
                continue;
            }
            history.entry(r.pool_id.clone()).or_default().push((r.block, r.reserve0.clone(), r.reserve1.clone()));
        }
        for h in history.values_mut() {
            h.sort_by_key(|(b, _, _)| *b);
            // Keep the last record of a block if duplicates slipped through.
            h.dedup_by(|later, earlier| {
                if later.0 == earlier.0 {
                    std::mem::swap(later, earlier);
                    true
                } else {
                    false
                }
            });
        }
        SnapshotProvider { graph: graph.clone(), history, ignored_records: ignored }
    }

    pub fn graph(&self) -> &PoolGraph {
        &self.graph
    }

    pub fn ignored_records(&self) -> usize {
        self.ignored_records
    }

    /// Reserves of `pool` at the beginning of `block`.
    pub fn reserves_at(&self, pool: &PoolId, block: u64) -> Option<(&Amount, &Amount)> {
        let h = self.history.get(pool)?;
        let idx = h.partition_point(|(b, _, _)| *b < block);
        if idx == 0 {
            return None;
        }
        let (_, r0, r1) = &h[idx - 1];
        Some((r0, r1))
    }

    /// Reserves recorded at the end of exactly `block`, if any.
    pub fn record_at(&self, pool: &PoolId, block: u64) -> Option<(&Amount, &Amount)> {
        let h = self.history.get(pool)?;
        h.binary_search_by_key(&block, |(b, _, _)| *b).ok().map(|i| (&h[i].1, &h[i].2))
    }

    pub fn snapshot(&self, block: u64) -> BlockSnapshot {
        self.snapshot_of(block, self.graph.pools().map(|p| &p.id))
    }

    /// Snapshot restricted to the given pools.
    pub fn snapshot_of<'a>(&self, block: u64, pools: impl IntoIterator<Item = &'a PoolId>) -> BlockSnapshot {
        let mut snap = BlockSnapshot::new(block);
        for id in pools {
            let Some(info) = self.graph.pool(id) else { continue };
            if let Some((r0, r1)) = self.reserves_at(id, block) {
                snap.insert(info.with_reserves(r0.clone(), r1.clone()));
            }
        }
        snap
    }

    /// Blocks carrying at least one record, ascending.
    pub fn record_blocks(&self) -> Vec<u64> {
        let mut blocks: Vec<u64> = self.history.values().flat_map(|h| h.iter().map(|(b, _, _)| *b)).collect();
        blocks.sort_unstable();
        blocks.dedup();
        blocks
    }
}
