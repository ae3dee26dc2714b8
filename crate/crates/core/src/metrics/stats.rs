use serde::{Deserialize, Serialize};

use crate::arb::{OpportunityRecord, OpportunityRun};
use crate::route::AuditResult;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GainStats {
    pub n: usize,
    pub mean_pct: f64,
    pub median_pct: f64,
    /// Mean of the best `ceil(0.05·n)` gains.
    pub top5_mean_pct: f64,
}

/// Gain statistics, or an explicit marker when nothing was optimizable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum GainReport {
    Empty,
    Computed(GainStats),
}

pub fn gain_stats_of(gains: &[f64]) -> Option<GainStats> {
    if gains.is_empty() {
        return None;
    }
    let mut sorted = gains.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let n = sorted.len();
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let median = if n % 2 == 1 { sorted[n / 2] } else { 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]) };
    let top = (n * 5).div_ceil(100);
    let top5 = sorted[..top].iter().sum::<f64>() / top as f64;
    Some(GainStats { n, mean_pct: mean, median_pct: median, top5_mean_pct: top5 })
}

/// Statistics of `gain_pct` over the optimizable audits.
pub fn gain_stats(audits: &[AuditResult]) -> GainReport {
    let gains: Vec<f64> = audits.iter().filter(|a| a.optimizable).map(|a| a.gain_pct).collect();
    match gain_stats_of(&gains) {
        Some(s) => GainReport::Computed(s),
        None => GainReport::Empty,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathHistogram {
    pub one: usize,
    pub two: usize,
    pub three: usize,
    pub four_or_more: usize,
}

impl PathHistogram {
    pub fn total(&self) -> usize {
        self.one + self.two + self.three + self.four_or_more
    }
}

/// Number of paths used by each optimizable trade.
pub fn path_distribution(audits: &[AuditResult]) -> PathHistogram {
    let mut h = PathHistogram::default();
    for a in audits.iter().filter(|a| a.optimizable) {
        match a.paths_used {
            0 | 1 => h.one += 1,
            2 => h.two += 1,
            3 => h.three += 1,
            _ => h.four_or_more += 1,
        }
    }
    h
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoutingSummary {
    pub audited: usize,
    pub optimizable: usize,
    pub optimizable_share: Option<f64>,
    pub gains: GainReport,
    pub path_distribution: PathHistogram,
}

pub fn routing_summary(audits: &[AuditResult]) -> RoutingSummary {
    let optimizable = audits.iter().filter(|a| a.optimizable).count();
    RoutingSummary {
        audited: audits.len(),
        optimizable,
        optimizable_share: (!audits.is_empty()).then(|| optimizable as f64 / audits.len() as f64),
        gains: gain_stats(audits),
        path_distribution: path_distribution(audits),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArbStats {
    pub blocks_scanned: u64,
    pub blocks_with_arb: usize,
    pub opportunities: usize,
    /// Mean of the per-opportunity relative profit.
    pub mean_relative_profit_pct: Option<f64>,
    /// Total profit over total optimal input, both in USD.
    pub usd_weighted_relative_profit_pct: Option<f64>,
    pub total_profit_usd: f64,
    pub runs: usize,
    pub mean_duration_blocks: Option<f64>,
    pub min_duration_blocks: Option<u64>,
    pub max_duration_blocks: Option<u64>,
}

pub fn arb_stats(opportunities: &[OpportunityRecord], runs: &[OpportunityRun], blocks_scanned: u64) -> ArbStats {
    let mut blocks: Vec<u64> = opportunities.iter().map(|o| o.block).collect();
    blocks.sort_unstable();
    blocks.dedup();
    let n = opportunities.len();
    let mean = (n > 0).then(|| opportunities.iter().map(|o| o.relative_profit_pct).sum::<f64>() / n as f64);
    let total_profit_usd: f64 = opportunities.iter().map(|o| o.profit_usd).sum();
    let total_input_usd: f64 = opportunities.iter().map(|o| 100.0 * o.profit_usd / o.relative_profit_pct).sum();
    let weighted = (n > 0 && total_input_usd > 0.0).then(|| 100.0 * total_profit_usd / total_input_usd);
    ArbStats {
        blocks_scanned,
        blocks_with_arb: blocks.len(),
        opportunities: n,
        mean_relative_profit_pct: mean,
        usd_weighted_relative_profit_pct: weighted,
        total_profit_usd,
        runs: runs.len(),
        mean_duration_blocks: crate::arb::mean_duration(runs),
        min_duration_blocks: runs.iter().map(|r| r.duration_blocks).min(),
        max_duration_blocks: runs.iter().map(|r| r.duration_blocks).max(),
    }
}
