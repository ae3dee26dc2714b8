use chrono::NaiveDate;
use num_bigint::{BigInt, BigUint};
use num_traits::{FromPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::paths::{direct_path, enumerate_paths, select_path_set, PathSetConfig};
use super::solver::{count_used_paths, optimal_split, RoutePlan};
use super::RouteError;
use crate::amount::{dec_str, ratio_to_f64, signed_dec_str, signed_to_whole_units, to_whole_units, Amount};
use crate::cpmm::{swap_out, Pool, PoolId};
use crate::effective::{path_output, reduce_path, TradePath};
use crate::ingest::{PoolGraph, PriceTable, SwapEvent};
use crate::snapshot::BlockSnapshot;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditThresholds {
    /// Trades below this USD value are not audited.
    pub min_trade_usd: f64,
    /// A trade is optimizable when routing gains more than this (USD).
    pub min_gain_usd: f64,
    /// Share of the input above which a path counts as used.
    pub path_usage: f64,
}

impl Default for AuditThresholds {
    fn default() -> Self {
        AuditThresholds { min_trade_usd: 30_000.0, min_gain_usd: 30.0, path_usage: 0.001 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathShare {
    pub path: String,
    #[serde(with = "dec_str")]
    pub amount_in: Amount,
    pub share: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditResult {
    pub block: u64,
    pub tx_hash: String,
    pub tx_index: u64,
    pub log_index: u64,
    pub pool_id: PoolId,
    pub token_in: String,
    pub token_out: String,
    #[serde(with = "dec_str")]
    pub amount_in: Amount,
    #[serde(with = "dec_str")]
    pub original_output: Amount,
    #[serde(with = "dec_str")]
    pub optimal_output: Amount,
    #[serde(with = "signed_dec_str")]
    pub gain_tokens: BigInt,
    pub gain_usd: f64,
    pub gain_pct: f64,
    pub paths_used: usize,
    pub optimizable: bool,
    pub allocations: Vec<PathShare>,
}

#[derive(Clone, Debug, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum AuditOutcome {
    Audited(AuditResult),
    Unauditable { block: u64, tx_hash: String, reason: String },
}

impl AuditOutcome {
    pub fn audited(&self) -> Option<&AuditResult> {
        match self {
            AuditOutcome::Audited(r) => Some(r),
            AuditOutcome::Unauditable { .. } => None,
        }
    }
}

fn price(prices: &PriceTable, token: &str, day: NaiveDate) -> Result<f64, RouteError> {
    prices.price(token, day).ok_or_else(|| RouteError::MissingPrice { token: token.to_string(), day })
}

/// USD value of a pool's reserves at `day`.
pub fn pool_liquidity_usd(pool: &Pool, prices: &PriceTable, day: NaiveDate) -> Result<f64, RouteError> {
    let v0 = to_whole_units(&pool.reserve0, pool.token0.decimals) * price(prices, &pool.token0.symbol, day)?;
    let v1 = to_whole_units(&pool.reserve1, pool.token1.decimals) * price(prices, &pool.token1.symbol, day)?;
    Ok(v0 + v1)
}

/// USD size of a trade: the indexer-reported value when present, otherwise
/// the input priced at the day's reference price.
pub fn trade_usd_value(event: &SwapEvent, graph: &PoolGraph, prices: &PriceTable, day: NaiveDate) -> Result<f64, RouteError> {
    if let Some(v) = event.usd_value {
        return Ok(v);
    }
    let token = graph
        .token(&event.token_in)
        .ok_or_else(|| RouteError::Domain(format!("unknown token {}", event.token_in)))?;
    Ok(to_whole_units(&event.amount_in, token.decimals) * price(prices, &event.token_in, day)?)
}

/// Splits `total` into integers proportional to the float plan, handing the
/// rounding remainder to the largest allocation.
fn integer_allocation(plan: &RoutePlan, total: &Amount) -> Vec<Amount> {
    let mut amounts: Vec<Amount> = plan
        .inputs
        .iter()
        .map(|&x| {
            let share = if plan.total_input > 0.0 { x / plan.total_input } else { 0.0 };
            // share·total, using 2^53 fixed point to stay exact for large totals.
            let scaled = BigUint::from_f64((share * (1u64 << 53) as f64).floor()).unwrap_or_default();
            (total * scaled) >> 53u32
        })
        .collect();
    let assigned: Amount = amounts.iter().sum();
    if let Some((i, _)) = plan.inputs.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)) {
        if &assigned <= total {
            amounts[i] += total - &assigned;
        }
    }
    amounts
}

/// Audits one historical swap against the optimal split across the
/// independent path set at the beginning of its block.
///
/// The swap's own pool is always part of the path set, so the optimum is
/// never worse than the original routing. Output gain is valued in USD of
/// the output token on `day`.
pub fn audit_trade(
    event: &SwapEvent,
    snapshot: &BlockSnapshot,
    graph: &PoolGraph,
    cfg: &PathSetConfig,
    thresholds: &AuditThresholds,
    prices: &PriceTable,
    day: NaiveDate,
) -> Result<AuditOutcome, RouteError> {
    let unauditable = |reason: String| {
        Ok(AuditOutcome::Unauditable { block: event.block, tx_hash: event.tx_hash.clone(), reason })
    };
    let Some(out_token) = graph.token(&event.token_out) else {
        return unauditable(format!("unknown token {}", event.token_out));
    };
    if graph.token(&event.token_in).is_none() {
        return unauditable(format!("unknown token {}", event.token_in));
    }
    let Some(original_pool) = snapshot.pool(&event.pool_id).filter(|p| p.is_active()) else {
        return unauditable(format!("pool {} unavailable at block {}", event.pool_id, event.block));
    };
    let Some(original_path) = direct_path(original_pool, &event.token_in) else {
        return unauditable(format!("pool {} does not trade {}", event.pool_id, event.token_in));
    };
    if original_path.out_token.symbol != event.token_out {
        return unauditable(format!("pool {} does not return {}", event.pool_id, event.token_out));
    }

    let candidates = enumerate_paths(graph, &event.token_in, &event.token_out, cfg)?;
    let mut path_set = select_path_set(&candidates, snapshot, cfg, |p| pool_liquidity_usd(p, prices, day))?;
    if !path_set.contains(&original_path) {
        path_set.insert(0, original_path.clone());
    }
    let reduced: Vec<_> = path_set.iter().map(|p| reduce_path(p, snapshot)).collect::<Result<_, _>>()?;

    let total = &event.amount_in;
    let plan = optimal_split(&reduced, ratio_to_f64(total, &BigUint::from(1u32)))?;
    let amounts = integer_allocation(&plan, total);
    let mut optimized_output = Amount::zero();
    for (path, amount) in path_set.iter().zip(&amounts) {
        if !amount.is_zero() {
            optimized_output += path_output(path, snapshot, amount)?;
        }
    }

    let original_output = swap_out(original_pool, original_path.hops[0].dir, total)?;
    let (optimal_output, amounts, plan) = if optimized_output >= original_output {
        (optimized_output, amounts, plan)
    } else {
        // Integer rounding made the split worse than the original route.
        let keep: Vec<Amount> =
            path_set.iter().map(|p| if p == &original_path { total.clone() } else { Amount::zero() }).collect();
        let inputs = keep.iter().map(|a| ratio_to_f64(a, &BigUint::from(1u32))).collect();
        let fallback = RoutePlan { inputs, ..plan };
        (original_output.clone(), keep, fallback)
    };

    let gain_tokens = BigInt::from(optimal_output.clone()) - BigInt::from(original_output.clone());
    let gain_pct = if original_output.is_zero() {
        0.0
    } else {
        100.0 * signed_ratio(&gain_tokens, &original_output)
    };
    let gain_usd = signed_to_whole_units(&gain_tokens, out_token.decimals) * price(prices, &out_token.symbol, day)?;
    let paths_used = count_used_paths(&plan, thresholds.path_usage);

    let allocations = path_set
        .iter()
        .zip(&amounts)
        .map(|(p, a): (&TradePath, &Amount)| PathShare {
            path: p.label(),
            amount_in: a.clone(),
            share: ratio_to_f64(a, total),
        })
        .collect();

    Ok(AuditOutcome::Audited(AuditResult {
        block: event.block,
        tx_hash: event.tx_hash.clone(),
        tx_index: event.tx_index,
        log_index: event.log_index,
        pool_id: event.pool_id.clone(),
        token_in: event.token_in.clone(),
        token_out: event.token_out.clone(),
        amount_in: total.clone(),
        original_output,
        optimal_output,
        gain_tokens,
        gain_usd,
        gain_pct,
        paths_used,
        optimizable: gain_usd > thresholds.min_gain_usd,
        allocations,
    }))
}

fn signed_ratio(num: &BigInt, den: &BigUint) -> f64 {
    let magnitude = ratio_to_f64(num.magnitude(), den);
    if num.sign() == num_bigint::Sign::Minus {
        -magnitude
    } else {
        magnitude
    }
}
