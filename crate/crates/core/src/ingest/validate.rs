use std::collections::BTreeSet;

use num_bigint::BigInt;
use serde::Serialize;

use super::{SnapshotProvider, SwapEvent};
use crate::amount::{dec_str, ratio_to_f64, Amount};
use crate::cpmm::{swap_out, PoolId};

/// An event whose recorded output disagrees with the formula.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConsistencyFlag {
    pub block: u64,
    pub tx_hash: String,
    pub log_index: u64,
    pub pool_id: PoolId,
    #[serde(with = "dec_str")]
    pub expected_out: Amount,
    #[serde(with = "dec_str")]
    pub recorded_out: Amount,
    pub relative_deviation: f64,
    /// Whether earlier swaps of the same block were replayed first.
    pub replayed: bool,
}

/// A pool whose replayed end-of-block reserves miss the next record by more
/// than one base unit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosureMismatch {
    pub block: u64,
    pub pool_id: PoolId,
    pub reserve0_diff: String,
    pub reserve1_diff: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub tolerance: f64,
    pub checked: usize,
    pub replayed_checks: usize,
    pub skipped_unknown_pool: usize,
    pub skipped_no_snapshot: usize,
    pub flags: Vec<ConsistencyFlag>,
    pub closure_checked: usize,
    pub closure_mismatches: Vec<ClosureMismatch>,
}

impl ConsistencyReport {
    pub fn is_clean(&self) -> bool {
        self.flags.is_empty() && self.closure_mismatches.is_empty()
    }
}

/// Recomputes every swap from beginning-of-block reserves, replaying the
/// recorded earlier swaps of the same block on the same pool first, and
/// flags outputs deviating by more than `tolerance` (relative).
///
/// Also checks replay closure: where a reserve record exists at the end of a
/// block, the replayed reserves must match it within one base unit.
pub fn validate_consistency(events: &[SwapEvent], provider: &SnapshotProvider, tolerance: f64) -> ConsistencyReport {
    let mut report = ConsistencyReport { tolerance, ..Default::default() };
    let mut i = 0;
    while i < events.len() {
        let block = events[i].block;
        let end = i + events[i..].iter().take_while(|e| e.block == block).count();
        let block_events = &events[i..end];
        i = end;

        let mut state = provider.snapshot(block);
        let mut touched = BTreeSet::new();
        for ev in block_events {
            if provider.graph().pool(&ev.pool_id).is_none() {
                report.skipped_unknown_pool += 1;
                continue;
            }
            let Some(pool) = state.pool_mut(&ev.pool_id) else {
                report.skipped_no_snapshot += 1;
                continue;
            };
            let Some(dir) = pool.direction_for(&ev.token_in) else {
                report.skipped_unknown_pool += 1;
                continue;
            };
            let replayed = !touched.insert(ev.pool_id.clone());
            report.checked += 1;
            if replayed {
                report.replayed_checks += 1;
            }
            let expected = swap_out(pool, dir, &ev.amount_in).unwrap_or_default();
            let deviation = relative_deviation(&expected, &ev.amount_out);
            if deviation > tolerance {
                report.flags.push(ConsistencyFlag {
                    block,
                    tx_hash: ev.tx_hash.clone(),
                    log_index: ev.log_index,
                    pool_id: ev.pool_id.clone(),
                    expected_out: expected.clone(),
                    recorded_out: ev.amount_out.clone(),
                    relative_deviation: deviation,
                    replayed,
                });
            }
            // Advance with the formula output so one bad record is flagged once
            // instead of skewing every later check on the pool.
            pool.apply(dir, &ev.amount_in, &expected);
        }

        for id in &touched {
            let Some((r0, r1)) = provider.record_at(id, block) else { continue };
            let pool = state.pool(id).expect("touched pools are in the snapshot");
            report.closure_checked += 1;
            let d0 = BigInt::from(pool.reserve0.clone()) - BigInt::from(r0.clone());
            let d1 = BigInt::from(pool.reserve1.clone()) - BigInt::from(r1.clone());
            let one = BigInt::from(1);
            if d0.magnitude() > one.magnitude() || d1.magnitude() > one.magnitude() {
                report.closure_mismatches.push(ClosureMismatch {
                    block,
                    pool_id: id.clone(),
                    reserve0_diff: d0.to_string(),
                    reserve1_diff: d1.to_string(),
                });
            }
        }
    }
    report
}

fn relative_deviation(expected: &Amount, recorded: &Amount) -> f64 {
    if expected == recorded {
        return 0.0;
    }
    let diff = if expected > recorded { expected - recorded } else { recorded - expected };
    let base = expected.max(recorded);
    ratio_to_f64(&diff, base)
}
