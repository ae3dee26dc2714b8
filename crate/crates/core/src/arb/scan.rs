use chrono::NaiveDate;
use num_bigint::{BigInt, BigUint};
use num_traits::{FromPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::cycles::{cycle_effective, optimize_cycle, Cycle};
use super::ArbError;
use crate::cpmm::{swap_out, PoolId};
use crate::effective::PathError;
use crate::ingest::PriceTable;
use crate::snapshot::BlockSnapshot;

#[derive(Clone, Debug, PartialEq)]
pub struct CycleOpportunity {
    pub cycle: Cycle,
    pub block: u64,
    pub alpha_star: f64,
    pub profit: f64,
    pub relative_profit_pct: f64,
    pub profit_usd: f64,
    /// Profit of the floored optimal input, swapped with integer rounding.
    pub verified_profit: BigInt,
}

impl CycleOpportunity {
    /// USD value of the optimal input.
    pub fn alpha_usd(&self) -> f64 {
        self.profit_usd * self.alpha_star / self.profit
    }

    pub fn record(&self) -> OpportunityRecord {
        OpportunityRecord {
            block: self.block,
            cycle_key: self.cycle.canonical_key.clone(),
            pools: self.cycle.pool_ids(),
            alpha_star: self.alpha_star,
            profit: self.profit,
            relative_profit_pct: self.relative_profit_pct,
            profit_usd: self.profit_usd,
        }
    }
}

/// One line of the opportunities JSONL output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpportunityRecord {
    pub block: u64,
    pub cycle_key: String,
    pub pools: Vec<PoolId>,
    pub alpha_star: f64,
    pub profit: f64,
    pub relative_profit_pct: f64,
    pub profit_usd: f64,
}

/// Evaluates every cycle on `snapshot` and keeps those whose optimal profit
/// is worth more than `min_profit_usd` on `day`.
pub fn scan_block(
    snapshot: &BlockSnapshot,
    cycles: &[Cycle],
    prices: &PriceTable,
    day: NaiveDate,
    min_profit_usd: f64,
) -> Result<Vec<CycleOpportunity>, ArbError> {
    let mut found = Vec::new();
    for cycle in cycles {
        // Cycles through a missing or drained pool are unavailable this block.
        let Ok(ep) = cycle_effective(cycle, snapshot) else { continue };
        let Some(opt) = optimize_cycle(&ep) else { continue };
        let base = &cycle.base_token;
        let price = prices
            .price(&base.symbol, day)
            .ok_or_else(|| ArbError::MissingPrice { token: base.symbol.clone(), day })?;
        let profit_usd = opt.profit / 10f64.powi(i32::from(base.decimals)) * price;
        if profit_usd.partial_cmp(&min_profit_usd) != Some(std::cmp::Ordering::Greater) {
            continue;
        }
        let verified_profit = verify(cycle, snapshot, opt.alpha_star)?;
        if verified_profit <= BigInt::zero() {
            continue;
        }
        found.push(CycleOpportunity {
            cycle: cycle.clone(),
            block: snapshot.block,
            alpha_star: opt.alpha_star,
            profit: opt.profit,
            relative_profit_pct: opt.relative_profit_pct(),
            profit_usd,
            verified_profit,
        });
    }
    Ok(found)
}

/// Swaps the floored optimal input around the cycle with per-hop integer
/// rounding and returns output minus input.
fn verify(cycle: &Cycle, snapshot: &BlockSnapshot, alpha_star: f64) -> Result<BigInt, ArbError> {
    let alpha = BigUint::from_f64(alpha_star.floor()).unwrap_or_default();
    if alpha.is_zero() {
        return Ok(BigInt::zero());
    }
    let mut amount = alpha.clone();
    for hop in &cycle.hops {
        let pool = snapshot.pool(&hop.pool).ok_or_else(|| PathError::MissingPool(hop.pool.clone()))?;
        amount = swap_out(pool, hop.dir, &amount).map_err(PathError::from)?;
    }
    Ok(BigInt::from(amount) - BigInt::from(alpha))
}
