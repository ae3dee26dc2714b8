#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ammscope_core::amount::Amount;
use ammscope_core::cpmm::{swap_out, Direction};
use ammscope_core::ingest::{write_events, write_jsonl, write_reserves, BlockTime, PoolGraph, PriceRow, ReserveRecord, SwapEvent, parse_graph};
use chrono::NaiveDate;
use num_bigint::BigUint;

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ammscope"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).env_clear().output().expect("binary runs")
}

pub fn units(whole: u64, decimals: u32) -> Amount {
    BigUint::from(whole) * BigUint::from(10u32).pow(decimals)
}

pub fn day() -> NaiveDate {
    NaiveDate::from_ymd_opt(2021, 1, 4).unwrap()
}

/// 2021-01-04 00:00:00 UTC.
pub const T0: u64 = 1_609_718_400;

fn write_prices(dir: &Path) {
    let rows: Vec<PriceRow> = [("BTC", 30_000.0), ("DAI", 1.0), ("ETH", 1_000.0), ("USDC", 1.0), ("USDT", 1.0)]
        .into_iter()
        .map(|(token, price)| PriceRow {
            token: token.into(),
            day: day(),
            price,
            high: Some(price * 1.1),
            low: Some(price / 1.1),
        })
        .collect();
    write_jsonl(fs::File::create(dir.join("prices.jsonl")).unwrap(), &rows).unwrap();
}

fn write_blocks(dir: &Path, blocks: impl IntoIterator<Item = u64>) {
    let times: Vec<BlockTime> = blocks.into_iter().map(|b| BlockTime { block: b, timestamp: T0 + 13 * b }).collect();
    write_jsonl(fs::File::create(dir.join("blocks.jsonl")).unwrap(), &times).unwrap();
}

pub const F1_GRAPH: &str = r#"{
  "tokens": [{ "symbol": "BTC", "decimals": 8 }, { "symbol": "ETH", "decimals": 18 }],
  "pools": [
    { "id": "sushi-BTC-ETH", "venue": "sushiswap", "token0": "BTC", "token1": "ETH" },
    { "id": "uni-BTC-ETH", "venue": "uniswap", "token0": "BTC", "token1": "ETH" }
  ],
  "networks": { "routing": { "kind": "paths" } }
}"#;

/// Two BTC/ETH venues, the shallow one overpricing BTC by 3.3%, and one
/// 50 ETH trade routed entirely through the shallow one. A second, small
/// trade stays below the size filter.
pub fn write_f1(dir: &Path) -> PathBuf {
    fs::create_dir_all(dir).unwrap();
    fs::write(dir.join("graph.json"), F1_GRAPH).unwrap();
    let g = parse_graph("f1", F1_GRAPH).unwrap();
    let records = vec![
        ReserveRecord { block: 99, pool_id: "sushi-BTC-ETH".into(), reserve0: units(100, 8), reserve1: units(3_100, 18) },
        ReserveRecord { block: 99, pool_id: "uni-BTC-ETH".into(), reserve0: units(1_000, 8), reserve1: units(30_000, 18) },
    ];
    let sushi = g.pool(&"sushi-BTC-ETH".into()).unwrap().with_reserves(units(100, 8), units(3_100, 18));
    let mut after = sushi.clone();
    let mut events = Vec::new();
    for (i, eth) in [(0u64, units(50, 18)), (1, units(1, 17))] {
        let out = swap_out(&after, Direction::OneForZero, &eth).unwrap();
        events.push(SwapEvent {
            block: 100,
            tx_hash: format!("0xf1{i}"),
            tx_index: i,
            log_index: 0,
            pool_id: "sushi-BTC-ETH".into(),
            token_in: "ETH".into(),
            token_out: "BTC".into(),
            amount_in: eth.clone(),
            amount_out: out.clone(),
            usd_value: None,
        });
        after.apply(Direction::OneForZero, &eth, &out);
    }
    let mut records = records;
    records.push(ReserveRecord { block: 100, pool_id: "sushi-BTC-ETH".into(), reserve0: after.reserve0, reserve1: after.reserve1 });
    write_reserves(fs::File::create(dir.join("reserves.jsonl")).unwrap(), &records).unwrap();
    write_events(fs::File::create(dir.join("events.jsonl")).unwrap(), &events).unwrap();
    write_prices(dir);
    write_blocks(dir, 99..=101);
    dir.to_path_buf()
}

/// Reserves of the Uniswap triangle at the end of each block in
/// `7..=16`; the ETH/USDC pool is 5% short of USDC at the end of the
/// blocks listed in `mispriced_after`.
pub fn write_triangle(dir: &Path, mispriced_after: &[u64]) -> PathBuf {
    fs::create_dir_all(dir).unwrap();
    let mut records = Vec::new();
    for b in 7..=16u64 {
        let usdc = if mispriced_after.contains(&b) { units(9_500_000, 6) } else { units(10_000_000, 6) };
        records.push(ReserveRecord { block: b, pool_id: "uni-ETH-USDC".into(), reserve0: units(10_000, 18), reserve1: usdc });
        records.push(ReserveRecord { block: b, pool_id: "uni-ETH-USDT".into(), reserve0: units(10_000, 18), reserve1: units(10_000_000, 6) });
        records.push(ReserveRecord { block: b, pool_id: "uni-USDC-USDT".into(), reserve0: units(10_000_000, 6), reserve1: units(10_000_000, 6) });
    }
    records.sort_by(|a, b| (a.block, &a.pool_id).cmp(&(b.block, &b.pool_id)));
    write_reserves(fs::File::create(dir.join("reserves.jsonl")).unwrap(), &records).unwrap();
    write_prices(dir);
    write_blocks(dir, 7..=17);
    dir.to_path_buf()
}

/// Every default-graph pool at consistent prices, recorded at block 9.
pub fn write_balanced(dir: &Path) -> PathBuf {
    fs::create_dir_all(dir).unwrap();
    let g = PoolGraph::default_graph();
    let price = |s: &str| match s {
        "ETH" => 1_000u64,
        "BTC" => 30_000,
        _ => 1,
    };
    let records: Vec<ReserveRecord> = g
        .pools()
        .map(|p| {
            let side = |t: &ammscope_core::cpmm::TokenId| units(5_000_000, u32::from(t.decimals)) / BigUint::from(price(&t.symbol));
            ReserveRecord { block: 9, pool_id: p.id.clone(), reserve0: side(&p.token0), reserve1: side(&p.token1) }
        })
        .collect();
    write_reserves(fs::File::create(dir.join("reserves.jsonl")).unwrap(), &records).unwrap();
    write_prices(dir);
    write_blocks(dir, 9..=12);
    dir.to_path_buf()
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

pub fn read(p: &Path) -> Vec<u8> {
    fs::read(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}
