#![allow(dead_code)]

use ammscope_core::amount::Amount;
use ammscope_core::cpmm::{swap_out, Direction};
use ammscope_core::ingest::{parse_graph, PoolGraph, PriceTable, SwapEvent};
use ammscope_core::snapshot::BlockSnapshot;
use chrono::NaiveDate;
use num_bigint::BigUint;

pub fn day() -> NaiveDate {
    NaiveDate::from_ymd_opt(2021, 1, 4).unwrap()
}

pub fn units(whole: u64, decimals: u32) -> Amount {
    BigUint::from(whole) * BigUint::from(10u32).pow(decimals)
}

pub fn prices() -> PriceTable {
    let mut t = PriceTable::new();
    for (sym, p) in [("ETH", 1_000.0), ("BTC", 30_000.0), ("USDC", 1.0), ("USDT", 1.0), ("DAI", 1.0)] {
        t.insert(sym, day(), p);
    }
    t
}

pub const F1_GRAPH: &str = r#"{
  "tokens": [{ "symbol": "BTC", "decimals": 8 }, { "symbol": "ETH", "decimals": 18 }],
  "pools": [
    { "id": "sushi-BTC-ETH", "venue": "sushiswap", "token0": "BTC", "token1": "ETH" },
    { "id": "uni-BTC-ETH", "venue": "uniswap", "token0": "BTC", "token1": "ETH" }
  ],
  "networks": { "routing": { "kind": "paths" } }
}"#;

pub fn f1_graph() -> PoolGraph {
    parse_graph("f1", F1_GRAPH).unwrap()
}

/// Two BTC/ETH venues. Uniswap is ten times deeper at 30 ETH/BTC; SushiSwap
/// prices BTC at 31 ETH.
pub fn f1_snapshot(block: u64) -> BlockSnapshot {
    let g = f1_graph();
    BlockSnapshot::from_pools(
        block,
        [
            g.pool(&"uni-BTC-ETH".into()).unwrap().with_reserves(units(1_000, 8), units(30_000, 18)),
            g.pool(&"sushi-BTC-ETH".into()).unwrap().with_reserves(units(100, 8), units(3_100, 18)),
        ],
    )
}

/// 50 ETH sold for BTC on the shallow, mispriced venue only.
pub fn f1_event(block: u64) -> SwapEvent {
    let snap = f1_snapshot(block);
    let amount_in = units(50, 18);
    let amount_out = swap_out(snap.pool(&"sushi-BTC-ETH".into()).unwrap(), Direction::OneForZero, &amount_in).unwrap();
    SwapEvent {
        block,
        tx_hash: "0xf1".into(),
        tx_index: 0,
        log_index: 0,
        pool_id: "sushi-BTC-ETH".into(),
        token_in: "ETH".into(),
        token_out: "BTC".into(),
        amount_in,
        amount_out,
        usd_value: None,
    }
}

/// The Uniswap ETH/USDC/USDT triangle at ETH = 1000 USD, 10M USD per side.
/// With `mispriced`, the ETH/USDC pool holds 5% less USDC.
pub fn f2_snapshot(block: u64, mispriced: bool) -> BlockSnapshot {
    let g = PoolGraph::default_graph();
    let usdc = if mispriced { units(9_500_000, 6) } else { units(10_000_000, 6) };
    BlockSnapshot::from_pools(
        block,
        [
            g.pool(&"uni-ETH-USDC".into()).unwrap().with_reserves(units(10_000, 18), usdc),
            g.pool(&"uni-ETH-USDT".into()).unwrap().with_reserves(units(10_000, 18), units(10_000_000, 6)),
            g.pool(&"uni-USDC-USDT".into()).unwrap().with_reserves(units(10_000_000, 6), units(10_000_000, 6)),
        ],
    )
}

/// Reserves of every default-graph pool consistent with one set of USD
/// prices, with each pool's depth drawn from `depths_usd`.
pub fn consistent_snapshot(block: u64, depths_usd: &[f64]) -> BlockSnapshot {
    let g = PoolGraph::default_graph();
    let price = |s: &str| match s {
        "ETH" => 1_000u64,
        "BTC" => 30_000,
        _ => 1,
    };
    let mut snap = BlockSnapshot::new(block);
    for (i, info) in g.pools().enumerate() {
        let depth = depths_usd[i % depths_usd.len()].max(1.0) as u64;
        // depth/price whole tokens on each side, exact in base units.
        let side = |t: &ammscope_core::cpmm::TokenId| {
            BigUint::from(depth) * BigUint::from(10u32).pow(u32::from(t.decimals)) / BigUint::from(price(&t.symbol))
        };
        snap.insert(info.with_reserves(side(&info.token0), side(&info.token1)));
    }
    snap
}
