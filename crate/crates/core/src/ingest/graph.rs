use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{read_text, IngestError};
use crate::amount::Amount;
use crate::arb::CycleSetConfig;
use crate::cpmm::{Fee, Pool, PoolId, TokenId, Venue};
use crate::route::PathSetConfig;

/// Pool graph shipped with the crate: Uniswap and SushiSwap pools between
/// BTC, DAI, ETH, USDC and USDT, with the routing and cycle networks used for
/// the efficiency analysis.
pub const DEFAULT_GRAPH_JSON: &str = include_str!("../../config/default_graph.json");

/// Static description of a pool; reserves come from a snapshot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoolInfo {
    pub id: PoolId,
    pub venue: Venue,
    pub token0: TokenId,
    pub token1: TokenId,
    pub fee: Fee,
}

impl PoolInfo {
    pub fn with_reserves(&self, reserve0: Amount, reserve1: Amount) -> Pool {
        Pool {
            id: self.id.clone(),
            venue: self.venue.clone(),
            token0: self.token0.clone(),
            token1: self.token1.clone(),
            reserve0,
            reserve1,
            fee: self.fee,
        }
    }

    pub fn other_token(&self, symbol: &str) -> Option<&TokenId> {
        if self.token0.symbol == symbol {
            Some(&self.token1)
        } else if self.token1.symbol == symbol {
            Some(&self.token0)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Network {
    Paths(PathSetConfig),
    Cycles(CycleSetConfig),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoolGraph {
    tokens: BTreeMap<String, TokenId>,
    pools: BTreeMap<PoolId, PoolInfo>,
    networks: BTreeMap<String, Network>,
}

impl PoolGraph {
    pub fn new(tokens: Vec<TokenId>, pools: Vec<PoolInfo>) -> Result<Self, IngestError> {
        let mut g = PoolGraph { tokens: BTreeMap::new(), pools: BTreeMap::new(), networks: BTreeMap::new() };
        for t in tokens {
            if g.tokens.insert(t.symbol.clone(), t.clone()).is_some() {
                return Err(IngestError::Config(format!("duplicate token {}", t.symbol)));
            }
        }
        for p in pools {
            for t in [&p.token0, &p.token1] {
                if g.tokens.get(&t.symbol) != Some(t) {
                    return Err(IngestError::Config(format!("pool {} references unknown token {}", p.id, t.symbol)));
                }
            }
            if p.token0.symbol == p.token1.symbol {
                return Err(IngestError::Config(format!("pool {} has identical tokens", p.id)));
            }
            if g.pools.contains_key(&p.id) {
                return Err(IngestError::Config(format!("duplicate pool id {}", p.id)));
            }
            g.pools.insert(p.id.clone(), p);
        }
        Ok(g)
    }

    pub fn add_network(&mut self, name: &str, network: Network) -> Result<(), IngestError> {
        let (pools, tokens): (&[PoolId], Vec<&String>) = match &network {
            Network::Paths(cfg) => {
                if cfg.max_hops < 1 {
                    return Err(IngestError::Config(format!("network {name}: max_hops must be >= 1")));
                }
                (&cfg.allowed_pools, vec![])
            }
            Network::Cycles(cfg) => {
                if cfg.max_cycle_len < 2 {
                    return Err(IngestError::Config(format!("network {name}: max_cycle_len must be >= 2")));
                }
                (&cfg.allowed_pools, cfg.base_tokens.iter().collect())
            }
        };
        for id in pools {
            if !self.pools.contains_key(id) {
                return Err(IngestError::Config(format!("network {name}: unknown pool {id}")));
            }
        }
        for t in tokens {
            if !self.tokens.contains_key(t) {
                return Err(IngestError::Config(format!("network {name}: unknown token {t}")));
            }
        }
        self.networks.insert(name.to_string(), network);
        Ok(())
    }

    pub fn token(&self, symbol: &str) -> Option<&TokenId> {
        self.tokens.get(symbol)
    }

    pub fn tokens(&self) -> impl Iterator<Item = &TokenId> {
        self.tokens.values()
    }

    pub fn pool(&self, id: &PoolId) -> Option<&PoolInfo> {
        self.pools.get(id)
    }

    pub fn pools(&self) -> impl Iterator<Item = &PoolInfo> {
        self.pools.values()
    }

    pub fn pool_ids(&self) -> Vec<PoolId> {
        self.pools.keys().cloned().collect()
    }

    pub fn network(&self, name: &str) -> Option<&Network> {
        self.networks.get(name)
    }

    pub fn networks(&self) -> impl Iterator<Item = (&String, &Network)> {
        self.networks.iter()
    }

    /// First path network in name order, or a two-hop network over all pools.
    pub fn default_path_network(&self) -> PathSetConfig {
        self.networks
            .values()
            .find_map(|n| match n {
                Network::Paths(c) => Some(c.clone()),
                _ => None,
            })
            .unwrap_or_else(|| PathSetConfig::new(self.pool_ids()))
    }

    pub fn default_cycle_network(&self) -> CycleSetConfig {
        self.networks
            .values()
            .find_map(|n| match n {
                Network::Cycles(c) => Some(c.clone()),
                _ => None,
            })
            .unwrap_or_else(|| CycleSetConfig::new(self.pool_ids()))
    }

    pub fn default_graph() -> PoolGraph {
        parse_graph("default_graph.json", DEFAULT_GRAPH_JSON).expect("bundled graph is valid")
    }
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawGraph {
    tokens: Vec<RawToken>,
    pools: Vec<RawPool>,
    #[serde(default)]
    networks: BTreeMap<String, RawNetwork>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawToken {
    symbol: String,
    decimals: u8,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawPool {
    id: String,
    venue: Venue,
    token0: String,
    token1: String,
    #[serde(default)]
    fee: Fee,
}

#[derive(Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawNetwork {
    Paths {
        #[serde(default)]
        pools: Option<Vec<String>>,
        #[serde(default = "default_max_hops")]
        max_hops: usize,
        #[serde(default = "default_true")]
        include_both_direct_venues: bool,
    },
    Cycles {
        #[serde(default)]
        pools: Option<Vec<String>>,
        #[serde(default = "default_max_cycle_len")]
        max_cycle_len: usize,
        #[serde(default)]
        base_tokens: Vec<String>,
    },
}

fn default_max_hops() -> usize {
    2
}

fn default_true() -> bool {
    true
}

fn default_max_cycle_len() -> usize {
    4
}

/// Parses a graph configuration document.
pub fn parse_graph(source_name: &str, text: &str) -> Result<PoolGraph, IngestError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawGraph = serde_path_to_error::deserialize(de).map_err(|e| IngestError::Parse {
        source_name: source_name.to_string(),
        line: e.inner().line(),
        field: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    let cfg_err = |m: String| IngestError::Config(format!("{source_name}: {m}"));
    let tokens = raw
        .tokens
        .iter()
        .map(|t| TokenId::new(&t.symbol, t.decimals).map_err(|e| cfg_err(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let by_symbol: BTreeMap<&str, &TokenId> = tokens.iter().map(|t| (t.symbol.as_str(), t)).collect();
    let lookup = |s: &str, pool: &str| {
        by_symbol
            .get(s)
            .map(|t| (*t).clone())
            .ok_or_else(|| cfg_err(format!("pool {pool} references unknown token {s}")))
    };
    let mut pools = Vec::new();
    for p in &raw.pools {
        pools.push(PoolInfo {
            id: PoolId(p.id.clone()),
            venue: p.venue.clone(),
            token0: lookup(&p.token0, &p.id)?,
            token1: lookup(&p.token1, &p.id)?,
            fee: p.fee,
        });
    }
    let mut graph = PoolGraph::new(tokens.clone(), pools)?;
    for (name, net) in raw.networks {
        let resolve = |pools: Option<Vec<String>>| -> Result<Vec<PoolId>, IngestError> {
            let ids: Vec<PoolId> = match pools {
                Some(list) => list.into_iter().map(PoolId).collect(),
                None => graph.pool_ids(),
            };
            let unique: BTreeSet<&PoolId> = ids.iter().collect();
            if unique.len() != ids.len() {
                return Err(cfg_err(format!("network {name} lists a pool twice")));
            }
            Ok(ids)
        };
        let network = match net {
            RawNetwork::Paths { pools, max_hops, include_both_direct_venues } => Network::Paths(PathSetConfig {
                allowed_pools: resolve(pools)?,
                max_hops,
                include_both_direct_venues,
            }),
            RawNetwork::Cycles { pools, max_cycle_len, base_tokens } => Network::Cycles(CycleSetConfig {
                allowed_pools: resolve(pools)?,
                max_cycle_len,
                base_tokens,
            }),
        };
        graph.add_network(&name, network)?;
    }
    Ok(graph)
}

pub fn read_graph(path: &Path) -> Result<PoolGraph, IngestError> {
    parse_graph(&path.display().to_string(), &read_text(path)?)
}
