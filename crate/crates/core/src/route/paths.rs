use std::collections::{BTreeMap, BTreeSet};

use super::RouteError;
use crate::cpmm::{Direction, Pool, PoolId, TokenId};
use crate::effective::{reduce_path, Hop, TradePath};
use crate::ingest::PoolGraph;
use crate::snapshot::BlockSnapshot;

/// Which pools a routing analysis may use and how paths are assembled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathSetConfig {
    pub allowed_pools: Vec<PoolId>,
    pub max_hops: usize,
    /// Keep every direct pool between the pair (one per venue) rather than
    /// only the most liquid one.
    pub include_both_direct_venues: bool,
}

impl PathSetConfig {
    pub fn new(allowed_pools: Vec<PoolId>) -> Self {
        PathSetConfig { allowed_pools, max_hops: 2, include_both_direct_venues: true }
    }
}

/// All simple paths from `token_in` to `token_out` of at most `max_hops`
/// hops over the allowed pools, ordered lexicographically by pool ids.
pub fn enumerate_paths(
    graph: &PoolGraph,
    token_in: &str,
    token_out: &str,
    cfg: &PathSetConfig,
) -> Result<Vec<TradePath>, RouteError> {
    if token_in == token_out {
        return Err(RouteError::SameToken(token_in.to_string()));
    }
    let (Some(t_in), Some(t_out)) = (graph.token(token_in), graph.token(token_out)) else {
        return Ok(Vec::new());
    };
    let mut allowed: Vec<&PoolId> = cfg.allowed_pools.iter().collect();
    allowed.sort();
    let mut adjacency: BTreeMap<&str, Vec<(PoolId, Direction, &str)>> = BTreeMap::new();
    for id in allowed {
        let Some(info) = graph.pool(id) else { continue };
        adjacency.entry(&info.token0.symbol).or_default().push((id.clone(), Direction::ZeroForOne, &info.token1.symbol));
        adjacency.entry(&info.token1.symbol).or_default().push((id.clone(), Direction::OneForZero, &info.token0.symbol));
    }

    let mut found = Vec::new();
    let mut visited = BTreeSet::from([token_in]);
    let mut hops = Vec::new();
    dfs(&adjacency, token_in, token_out, cfg.max_hops, &mut visited, &mut hops, &mut found);

    let mut paths: Vec<TradePath> =
        found.into_iter().map(|h| TradePath::from_parts(h, t_in.clone(), t_out.clone())).collect();
    paths.sort_by(|a, b| a.pool_ids().cmp(b.pool_ids()));
    Ok(paths)
}

fn dfs<'a>(
    adjacency: &BTreeMap<&'a str, Vec<(PoolId, Direction, &'a str)>>,
    at: &'a str,
    target: &str,
    budget: usize,
    visited: &mut BTreeSet<&'a str>,
    hops: &mut Vec<Hop>,
    found: &mut Vec<Vec<Hop>>,
) {
    if budget == 0 {
        return;
    }
    let Some(edges) = adjacency.get(at) else { return };
    for (pool, dir, next) in edges {
        if visited.contains(next) {
            continue;
        }
        hops.push(Hop { pool: pool.clone(), dir: *dir });
        if *next == target {
            found.push(hops.clone());
        } else {
            visited.insert(next);
            dfs(adjacency, next, target, budget - 1, visited, hops, found);
            visited.remove(next);
        }
        hops.pop();
    }
}

fn pair_key(pool: &Pool) -> (String, String) {
    let (a, b) = (pool.token0.symbol.clone(), pool.token1.symbol.clone());
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Turns enumerated paths into an independent path set at a block:
///
/// * paths through missing or inactive pools are dropped;
/// * direct pools are all kept, or only the most liquid one when
///   `include_both_direct_venues` is off;
/// * a multi-hop path is kept only if every hop uses the most liquid pool
///   for its token pair;
/// * finally paths are accepted greedily (direct first, then by length) so
///   that no two share a pool or an intermediate token.
///
/// `liquidity` is only consulted when several pools serve the same pair.
pub fn select_path_set(
    paths: &[TradePath],
    snapshot: &BlockSnapshot,
    cfg: &PathSetConfig,
    mut liquidity: impl FnMut(&Pool) -> Result<f64, RouteError>,
) -> Result<Vec<TradePath>, RouteError> {
    let available: Vec<&TradePath> = paths.iter().filter(|p| reduce_path(p, snapshot).is_ok()).collect();

    // Most liquid pool per unordered token pair among hops of multi-hop paths
    // and, separately, among direct pools.
    let mut best_for_pair: BTreeMap<(String, String), (PoolId, f64)> = BTreeMap::new();
    let mut candidates: BTreeMap<(String, String), BTreeSet<PoolId>> = BTreeMap::new();
    for p in &available {
        for id in p.pool_ids() {
            let pool = snapshot.pool(id).expect("available paths resolve");
            candidates.entry(pair_key(pool)).or_default().insert(id.clone());
        }
    }
    for (pair, ids) in &candidates {
        if ids.len() == 1 {
            let id = ids.iter().next().unwrap().clone();
            best_for_pair.insert(pair.clone(), (id, f64::NAN));
            continue;
        }
        let mut best: Option<(PoolId, f64)> = None;
        for id in ids {
            let value = liquidity(snapshot.pool(id).expect("available"))?;
            if best.as_ref().is_none_or(|(_, v)| value > *v) {
                best = Some((id.clone(), value));
            }
        }
        best_for_pair.insert(pair.clone(), best.expect("non-empty"));
    }
    let is_best = |id: &PoolId| {
        let pool = snapshot.pool(id).expect("available");
        best_for_pair.get(&pair_key(pool)).is_some_and(|(b, _)| b == id)
    };

    let mut direct: Vec<&TradePath> = available.iter().copied().filter(|p| p.len() == 1).collect();
    if !cfg.include_both_direct_venues {
        direct.retain(|p| is_best(&p.hops[0].pool));
    }
    let mut multi: Vec<&TradePath> =
        available.iter().copied().filter(|p| p.len() > 1 && p.pool_ids().all(&is_best)).collect();
    multi.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.pool_ids().cmp(b.pool_ids())));

    let mut used_pools: BTreeSet<PoolId> = BTreeSet::new();
    let mut used_tokens: BTreeSet<String> = BTreeSet::new();
    let mut selected = Vec::new();
    for p in direct.into_iter().chain(multi) {
        let inner = intermediate_tokens(p, snapshot);
        if p.pool_ids().any(|id| used_pools.contains(id)) || inner.iter().any(|t| used_tokens.contains(t)) {
            continue;
        }
        used_pools.extend(p.pool_ids().cloned());
        used_tokens.extend(inner);
        selected.push(p.clone());
    }
    Ok(selected)
}

fn intermediate_tokens(path: &TradePath, snapshot: &BlockSnapshot) -> Vec<String> {
    path.hops[..path.len() - 1]
        .iter()
        .map(|h| {
            let pool = snapshot.pool(&h.pool).expect("available");
            pool.tokens(h.dir).1.symbol.clone()
        })
        .collect()
}

/// Direct single-hop path through `pool` selling `token_in`.
pub fn direct_path(pool: &Pool, token_in: &str) -> Option<TradePath> {
    let dir = pool.direction_for(token_in)?;
    let (t_in, t_out): (&TokenId, &TokenId) = pool.tokens(dir);
    Some(TradePath::from_parts(vec![Hop { pool: pool.id.clone(), dir }], t_in.clone(), t_out.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Network;

    fn liquid_network(g: &PoolGraph) -> PathSetConfig {
        match g.network("routing-usdc-eth-liquid") {
            Some(Network::Paths(c)) => c.clone(),
            _ => unreachable!(),
        }
    }

    #[test]
    fn usdc_to_eth_on_liquid_network_has_five_paths() {
        let g = PoolGraph::default_graph();
        let paths = enumerate_paths(&g, "USDC", "ETH", &liquid_network(&g)).unwrap();
        let labels: Vec<String> = paths.iter().map(|p| p.label()).collect();
        assert_eq!(
            labels,
            vec![
                "sushi-ETH-USDC",
                "uni-BTC-USDC>uni-BTC-ETH",
                "uni-DAI-USDC>uni-DAI-ETH",
                "uni-ETH-USDC",
                "uni-USDC-USDT>uni-ETH-USDT",
            ]
        );
        assert!(paths.iter().all(|p| p.in_token.symbol == "USDC" && p.out_token.symbol == "ETH"));
    }

    #[test]
    fn same_token_is_rejected() {
        let g = PoolGraph::default_graph();
        assert!(matches!(
            enumerate_paths(&g, "ETH", "ETH", &liquid_network(&g)),
            Err(RouteError::SameToken(_))
        ));
    }

    #[test]
    fn single_direct_pool_with_one_hop() {
        let g = PoolGraph::default_graph();
        let cfg = PathSetConfig { allowed_pools: vec!["uni-BTC-ETH".into()], max_hops: 1, include_both_direct_venues: true };
        let paths = enumerate_paths(&g, "ETH", "BTC", &cfg).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].hops[0].dir, Direction::OneForZero);
    }

    #[test]
    fn no_path_gives_empty_list() {
        let g = PoolGraph::default_graph();
        let cfg = PathSetConfig { allowed_pools: vec!["uni-BTC-ETH".into()], max_hops: 3, include_both_direct_venues: true };
        assert!(enumerate_paths(&g, "USDC", "DAI", &cfg).unwrap().is_empty());
    }

    #[test]
    fn all_pool_network_collapses_to_five_independent_paths() {
        use crate::amount::Amount;
        let g = PoolGraph::default_graph();
        let cfg = PathSetConfig::new(g.pool_ids());
        let paths = enumerate_paths(&g, "USDC", "ETH", &cfg).unwrap();
        // direct x2, and two venues for each X-ETH leg through BTC, DAI and USDT
        assert_eq!(paths.len(), 8);
        let mut snap = BlockSnapshot::new(1);
        for info in g.pools() {
            // Uniswap pools twice as deep as SushiSwap ones.
            let depth: u64 = if info.id.as_str().starts_with("uni") { 2_000_000 } else { 1_000_000 };
            snap.insert(info.with_reserves(Amount::from(depth) * info.token0.unit(), Amount::from(depth) * info.token1.unit()));
        }
        let tvl = |p: &Pool| Ok(crate::amount::to_whole_units(&p.reserve0, p.token0.decimals));
        let set = select_path_set(&paths, &snap, &cfg, tvl).unwrap();
        let labels: Vec<String> = set.iter().map(|p| p.label()).collect();
        assert_eq!(
            labels,
            vec![
                "sushi-ETH-USDC",
                "uni-ETH-USDC",
                "uni-BTC-USDC>uni-BTC-ETH",
                "uni-DAI-USDC>uni-DAI-ETH",
                "uni-USDC-USDT>uni-ETH-USDT",
            ]
        );

        let only_best = PathSetConfig { include_both_direct_venues: false, ..cfg.clone() };
        let set = select_path_set(&paths, &snap, &only_best, tvl).unwrap();
        assert_eq!(set.len(), 4);
        assert_eq!(set[0].label(), "uni-ETH-USDC");
    }

    #[test]
    fn three_hop_paths_conflicting_with_shorter_ones_are_dropped() {
        use crate::amount::Amount;
        let g = PoolGraph::default_graph();
        let cfg = PathSetConfig { max_hops: 3, ..PathSetConfig::new(g.pool_ids()) };
        let paths = enumerate_paths(&g, "USDC", "ETH", &cfg).unwrap();
        assert!(paths.iter().any(|p| p.len() == 3));
        let mut snap = BlockSnapshot::new(1);
        for info in g.pools() {
            snap.insert(info.with_reserves(Amount::from(1000u32) * info.token0.unit(), Amount::from(1000u32) * info.token1.unit()));
        }
        let set = select_path_set(&paths, &snap, &cfg, |p| Ok(if p.id.as_str().starts_with("uni") { 2.0 } else { 1.0 })).unwrap();
        assert!(set.iter().all(|p| p.len() <= 2));
        // pairwise independent
        for (i, a) in set.iter().enumerate() {
            for b in &set[i + 1..] {
                assert!(a.pool_ids().all(|x| b.pool_ids().all(|y| x != y)));
            }
        }
    }
}
