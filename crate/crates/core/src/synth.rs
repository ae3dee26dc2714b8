//! Deterministic synthetic datasets that follow the swap formula exactly,
//! for end-to-end runs and replay checks without chain data.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDate};
use num_bigint::BigUint;
use num_traits::{FromPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::amount::{to_whole_units, Amount};
use crate::cpmm::{swap_out, Direction, Pool, PoolId};
use crate::ingest::{write_events, write_jsonl, write_reserves, BlockTime, PoolGraph, PriceRow, PriceTable, ReserveRecord, SwapEvent, DEFAULT_GRAPH_JSON};
use crate::snapshot::BlockSnapshot;

#[derive(Clone, Debug, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub first_block: u64,
    pub blocks: u64,
    pub max_swaps_per_block: u32,
    /// Unix time of `first_block`.
    pub start_timestamp: u64,
    pub seconds_per_block: u64,
    /// Largest swap as a fraction of the input reserve.
    pub max_trade_fraction: f64,
    /// Relative spread of initial pool prices around the reference price.
    pub price_noise: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 7,
            first_block: 11_565_020,
            blocks: 100,
            max_swaps_per_block: 4,
            start_timestamp: 1_609_459_200,
            seconds_per_block: 13,
            max_trade_fraction: 0.02,
            price_noise: 0.01,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthDataset {
    pub graph: PoolGraph,
    pub events: Vec<SwapEvent>,
    /// End-of-block reserves: every pool at `first_block − 1`, then each
    /// pool at every block where it traded.
    pub reserves: Vec<ReserveRecord>,
    pub prices: PriceTable,
    pub blocks: Vec<BlockTime>,
}

fn reference_price(symbol: &str) -> f64 {
    match symbol {
        "ETH" => 1_000.0,
        "BTC" => 30_000.0,
        _ => 1.0,
    }
}

fn whole_to_base(whole: f64, decimals: u8) -> Amount {
    // Split the scale so large decimals stay within f64 range and precision.
    let head = whole * 1e6;
    let base = BigUint::from_f64(head.round()).unwrap_or_default();
    if decimals >= 6 {
        base * BigUint::from(10u32).pow(u32::from(decimals) - 6)
    } else {
        base / BigUint::from(10u32).pow(6 - u32::from(decimals))
    }
}

fn day_of(timestamp: u64) -> NaiveDate {
    DateTime::from_timestamp(timestamp as i64, 0).map(|t| t.date_naive()).unwrap_or_default()
}

/// Generates a dataset on the default pool graph.
pub fn generate(cfg: &SynthConfig) -> SynthDataset {
    let graph = PoolGraph::default_graph();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut state = BlockSnapshot::new(cfg.first_block);
    let mut reserves = Vec::new();
    for info in graph.pools() {
        let depth_usd = 10f64.powf(rng.gen_range(5.5..7.5));
        let skew = 1.0 + rng.gen_range(-cfg.price_noise..=cfg.price_noise);
        let r0 = whole_to_base(depth_usd / reference_price(&info.token0.symbol) * skew, info.token0.decimals);
        let r1 = whole_to_base(depth_usd / reference_price(&info.token1.symbol), info.token1.decimals);
        reserves.push(ReserveRecord {
            block: cfg.first_block - 1,
            pool_id: info.id.clone(),
            reserve0: r0.clone(),
            reserve1: r1.clone(),
        });
        state.insert(info.with_reserves(r0, r1));
    }

    let pool_ids: Vec<PoolId> = graph.pool_ids();
    let mut events = Vec::new();
    let mut blocks = vec![BlockTime {
        block: cfg.first_block - 1,
        timestamp: cfg.start_timestamp.saturating_sub(cfg.seconds_per_block),
    }];
    for i in 0..cfg.blocks {
        let block = cfg.first_block + i;
        let timestamp = cfg.start_timestamp + i * cfg.seconds_per_block;
        blocks.push(BlockTime { block, timestamp });
        let mut touched = BTreeSet::new();
        let swaps = rng.gen_range(0..=cfg.max_swaps_per_block);
        for tx_index in 0..u64::from(swaps) {
            let id = &pool_ids[rng.gen_range(0..pool_ids.len())];
            let dir = if rng.gen_bool(0.5) { Direction::ZeroForOne } else { Direction::OneForZero };
            let pool: &Pool = state.pool(id).expect("pool present in state");
            let (r_in, _) = pool.reserves(dir);
            let fraction = cfg.max_trade_fraction * rng.gen_range(0.001f64..1.0).powi(2);
            let amount_in = BigUint::from_f64((crate::amount::ratio_to_f64(r_in, &BigUint::from(1u32)) * fraction).floor())
                .unwrap_or_default();
            if amount_in.is_zero() {
                continue;
            }
            let amount_out = swap_out(pool, dir, &amount_in).expect("active pool");
            let (t_in, t_out) = pool.tokens(dir);
            let usd_value = to_whole_units(&amount_in, t_in.decimals) * reference_price(&t_in.symbol);
            events.push(SwapEvent {
                block,
                tx_hash: format!("0x{:016x}{:016x}", block, tx_index),
                tx_index,
                log_index: 0,
                pool_id: id.clone(),
                token_in: t_in.symbol.clone(),
                token_out: t_out.symbol.clone(),
                amount_in: amount_in.clone(),
                amount_out: amount_out.clone(),
                usd_value: Some(usd_value),
            });
            state.pool_mut(id).expect("pool present in state").apply(dir, &amount_in, &amount_out);
            touched.insert(id.clone());
        }
        for id in touched {
            let p = state.pool(&id).expect("pool present in state");
            reserves.push(ReserveRecord {
                block,
                pool_id: id,
                reserve0: p.reserve0.clone(),
                reserve1: p.reserve1.clone(),
            });
        }
    }

    let mut prices = PriceTable::new();
    let days: BTreeSet<NaiveDate> = blocks.iter().map(|b| day_of(b.timestamp)).collect();
    let mut drift: BTreeMap<&str, f64> = BTreeMap::new();
    for day in days {
        for token in graph.tokens() {
            let walk = drift.entry(token.symbol.as_str()).or_insert(1.0);
            *walk *= 1.0 + rng.gen_range(-0.03..0.03);
            let price = reference_price(&token.symbol) * *walk;
            let spread = rng.gen_range(0.0..0.25);
            prices.insert(&token.symbol, day, price);
            prices.insert_range(&token.symbol, day, price * (1.0 + spread / 2.0), price / (1.0 + spread / 2.0));
        }
    }

    SynthDataset { graph, events, reserves, prices, blocks }
}

/// Writes `graph.json`, `events.jsonl`, `reserves.jsonl`, `prices.jsonl`
/// and `blocks.jsonl` into `dir`.
pub fn write_dataset(ds: &SynthDataset, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let create = |name: &str| -> std::io::Result<(PathBuf, BufWriter<File>)> {
        let path = dir.join(name);
        Ok((path.clone(), BufWriter::new(File::create(path)?)))
    };
    let (graph_path, mut w) = create("graph.json")?;
    w.write_all(DEFAULT_GRAPH_JSON.as_bytes())?;
    w.flush()?;
    let (events_path, w) = create("events.jsonl")?;
    write_events(w, &ds.events)?;
    let (reserves_path, w) = create("reserves.jsonl")?;
    write_reserves(w, &ds.reserves)?;
    let (prices_path, w) = create("prices.jsonl")?;
    write_jsonl::<PriceRow, _>(w, &ds.prices.rows())?;
    let (blocks_path, w) = create("blocks.jsonl")?;
    write_jsonl(w, &ds.blocks)?;
    Ok(vec![graph_path, events_path, reserves_path, prices_path, blocks_path])
}
