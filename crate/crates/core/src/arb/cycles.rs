use std::collections::{BTreeMap, BTreeSet};

use crate::cpmm::{Direction, PoolId, TokenId};
use crate::effective::{reduce_hops, EffectivePool, Hop, PathError};
use crate::ingest::PoolGraph;
use crate::snapshot::BlockSnapshot;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleSetConfig {
    pub allowed_pools: Vec<PoolId>,
    pub max_cycle_len: usize,
    /// Preferred start tokens, most preferred first. A cycle is evaluated in
    /// units of the first listed token it passes through; cycles touching
    /// none of them are skipped. Empty means "any token".
    pub base_tokens: Vec<String>,
}

impl CycleSetConfig {
    pub fn new(allowed_pools: Vec<PoolId>) -> Self {
        CycleSetConfig { allowed_pools, max_cycle_len: 4, base_tokens: Vec::new() }
    }
}

/// A directed cycle of pools, rotated to start at its base token.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    pub hops: Vec<Hop>,
    pub base_token: TokenId,
    /// Identifier independent of the start token: hops listed from the
    /// lexicographically smallest pool id.
    pub canonical_key: String,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.hops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hops.is_empty()
    }

    pub fn pool_ids(&self) -> Vec<PoolId> {
        self.hops.iter().map(|h| h.pool.clone()).collect()
    }
}

struct Edge<'a> {
    pool: PoolId,
    dir: Direction,
    from: &'a TokenId,
    to: &'a TokenId,
}

/// Every simple directed cycle of 2..=`max_cycle_len` pools, deduplicated
/// across rotations. Both orientations of a ring are distinct cycles. Sorted
/// by canonical key.
pub fn enumerate_cycles(graph: &PoolGraph, cfg: &CycleSetConfig) -> Vec<Cycle> {
    let mut allowed: Vec<&PoolId> = cfg.allowed_pools.iter().collect();
    allowed.sort();
    allowed.dedup();
    let mut adjacency: BTreeMap<&str, Vec<Edge>> = BTreeMap::new();
    for id in allowed {
        let Some(info) = graph.pool(id) else { continue };
        adjacency.entry(&info.token0.symbol).or_default().push(Edge {
            pool: id.clone(),
            dir: Direction::ZeroForOne,
            from: &info.token0,
            to: &info.token1,
        });
        adjacency.entry(&info.token1.symbol).or_default().push(Edge {
            pool: id.clone(),
            dir: Direction::OneForZero,
            from: &info.token1,
            to: &info.token0,
        });
    }

    let mut unique: BTreeMap<String, Vec<(Hop, &TokenId)>> = BTreeMap::new();
    let starts: Vec<&str> = adjacency.keys().copied().collect();
    for start in starts {
        let mut stack: Vec<(Hop, &TokenId)> = Vec::new();
        let mut visited = BTreeSet::from([start]);
        walk(&adjacency, start, start, cfg.max_cycle_len, &mut visited, &mut stack, &mut unique);
    }

    let mut cycles = Vec::new();
    for (key, hops) in unique {
        let inputs: Vec<&TokenId> = hops.iter().map(|(_, t)| *t).collect();
        let start = if cfg.base_tokens.is_empty() {
            Some(0)
        } else {
            cfg.base_tokens.iter().find_map(|b| inputs.iter().position(|t| &t.symbol == b))
        };
        let Some(start) = start else { continue };
        let mut rotated: Vec<(Hop, &TokenId)> = hops.clone();
        rotated.rotate_left(start);
        cycles.push(Cycle {
            base_token: rotated[0].1.clone(),
            hops: rotated.into_iter().map(|(h, _)| h).collect(),
            canonical_key: key,
        });
    }
    cycles
}

fn walk<'a>(
    adjacency: &BTreeMap<&'a str, Vec<Edge<'a>>>,
    start: &'a str,
    at: &'a str,
    budget: usize,
    visited: &mut BTreeSet<&'a str>,
    stack: &mut Vec<(Hop, &'a TokenId)>,
    unique: &mut BTreeMap<String, Vec<(Hop, &'a TokenId)>>,
) {
    if budget == 0 {
        return;
    }
    let Some(edges) = adjacency.get(at) else { return };
    for e in edges {
        if stack.iter().any(|(h, _)| h.pool == e.pool) {
            continue;
        }
        let next = e.to.symbol.as_str();
        stack.push((Hop { pool: e.pool.clone(), dir: e.dir }, e.from));
        if next == start {
            if stack.len() >= 2 {
                let canon = canonical_rotation(stack);
                unique.entry(key_of(&canon, adjacency)).or_insert(canon);
            }
        } else if !visited.contains(next) {
            visited.insert(next);
            walk(adjacency, start, next, budget - 1, visited, stack, unique);
            visited.remove(next);
        }
        stack.pop();
    }
}

fn canonical_rotation<'a>(hops: &[(Hop, &'a TokenId)]) -> Vec<(Hop, &'a TokenId)> {
    let first = hops
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .0.pool.cmp(&b.1 .0.pool))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut v = hops.to_vec();
    v.rotate_left(first);
    v
}

fn key_of(hops: &[(Hop, &TokenId)], adjacency: &BTreeMap<&str, Vec<Edge>>) -> String {
    hops.iter()
        .map(|(h, from)| {
            let to = adjacency[from.symbol.as_str()]
                .iter()
                .find(|e| e.pool == h.pool && e.dir == h.dir)
                .map(|e| e.to.symbol.as_str())
                .unwrap_or("?");
            format!("{}:{}>{}", h.pool, from.symbol, to)
        })
        .collect::<Vec<_>>()
        .join(",")
}

/// Reduces a cycle to one effective pool from its base token to itself.
pub fn cycle_effective(cycle: &Cycle, snapshot: &BlockSnapshot) -> Result<EffectivePool, PathError> {
    reduce_hops(&cycle.hops, snapshot)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CycleOptimum {
    /// Profit-maximizing input, in base units of the base token.
    pub alpha_star: f64,
    /// `g(α*) − α*`.
    pub profit: f64,
}

impl CycleOptimum {
    pub fn relative_profit_pct(&self) -> f64 {
        100.0 * self.profit / self.alpha_star
    }
}

/// Maximizes `g(α) − α`. Profitable iff `g'(0) = a/b > 1`; then
/// `α* = (sqrt(a·b) − b)/c` and the profit is `(sqrt(a) − sqrt(b))²/c`.
pub fn optimize_cycle(ep: &EffectivePool) -> Option<CycleOptimum> {
    if ep.in_token.symbol != ep.out_token.symbol || ep.a() <= ep.b() {
        return None;
    }
    let (ra, rb) = (ep.a().sqrt(), ep.b().sqrt());
    // sqrt(a) − sqrt(b) without cancellation; a − b is exact near a ≈ b.
    let gap = (ep.a() - ep.b()) / (ra + rb);
    let alpha_star = rb * gap / ep.c();
    let profit = gap * gap / ep.c();
    if !(alpha_star > 0.0 && profit > 0.0) {
        return None;
    }
    Some(CycleOptimum { alpha_star, profit })
}
