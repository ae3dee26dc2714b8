use std::collections::BTreeMap;

use serde::Serialize;

use crate::cpmm::{Pool, PoolId};

/// Pool state as of the beginning of a block.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BlockSnapshot {
    pub block: u64,
    pools: BTreeMap<PoolId, Pool>,
}

impl BlockSnapshot {
    pub fn new(block: u64) -> Self {
        BlockSnapshot { block, pools: BTreeMap::new() }
    }

    pub fn from_pools(block: u64, pools: impl IntoIterator<Item = Pool>) -> Self {
        BlockSnapshot {
            block,
            pools: pools.into_iter().map(|p| (p.id.clone(), p)).collect(),
        }
    }

    pub fn insert(&mut self, pool: Pool) {
        self.pools.insert(pool.id.clone(), pool);
    }

    pub fn pool(&self, id: &PoolId) -> Option<&Pool> {
        self.pools.get(id)
    }

    pub fn pool_mut(&mut self, id: &PoolId) -> Option<&mut Pool> {
        self.pools.get_mut(id)
    }

    pub fn pools(&self) -> impl Iterator<Item = &Pool> {
        self.pools.values()
    }

    pub fn len(&self) -> usize {
        self.pools.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pools.is_empty()
    }

    /// Deterministic JSON rendering, used to compare snapshots across runs.
    pub fn to_canonical_json(&self) -> String {
        #[derive(Serialize)]
        struct Row<'a> {
            pool: &'a str,
            reserve0: String,
            reserve1: String,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            block: u64,
            pools: Vec<Row<'a>>,
        }
        let doc = Doc {
            block: self.block,
            pools: self
                .pools
                .values()
                .map(|p| Row { pool: p.id.as_str(), reserve0: p.reserve0.to_string(), reserve1: p.reserve1.to_string() })
                .collect(),
        };
        serde_json::to_string(&doc).expect("snapshot serialization")
    }
}
