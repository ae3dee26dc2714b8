use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::series::{pearson, DailySeries};
use super::stats::{arb_stats, routing_summary, ArbStats, RoutingSummary};
use super::MetricsError;
use crate::arb::{OpportunityRecord, OpportunityRun};
use crate::route::AuditResult;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportThresholds {
    pub min_trade_usd: f64,
    pub min_gain_usd: f64,
    pub path_usage: f64,
    pub min_profit_usd: f64,
    pub max_hops: usize,
    pub max_cycle_len: usize,
}

impl Default for ReportThresholds {
    fn default() -> Self {
        ReportThresholds {
            min_trade_usd: 30_000.0,
            min_gain_usd: 30.0,
            path_usage: 0.001,
            min_profit_usd: 30.0,
            max_hops: 2,
            max_cycle_len: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DailySummary {
    pub first_day: Option<NaiveDate>,
    pub last_day: Option<NaiveDate>,
    pub price_token: String,
    pub correlation_arb_blocks_price_movement: Option<f64>,
    /// Why the correlation is missing, when it is.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correlation_note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub from_block: Option<u64>,
    pub to_block: Option<u64>,
    pub thresholds: ReportThresholds,
    pub routing: RoutingSummary,
    pub arbitrage: ArbStats,
    pub daily: DailySummary,
}

/// Everything a report is computed from.
#[derive(Clone, Debug, Default)]
pub struct ReportInputs {
    pub from_block: Option<u64>,
    pub to_block: Option<u64>,
    pub thresholds: ReportThresholds,
    pub audits: Vec<AuditResult>,
    pub opportunities: Vec<OpportunityRecord>,
    pub runs: Vec<OpportunityRun>,
    pub blocks_scanned: u64,
    pub price_token: String,
    /// Daily blocks-with-arbitrage and price movement over the same days.
    pub daily: Option<(DailySeries, DailySeries)>,
}

pub fn build_report(inputs: &ReportInputs) -> Result<Report, MetricsError> {
    let mut daily = DailySummary {
        first_day: None,
        last_day: None,
        price_token: inputs.price_token.clone(),
        correlation_arb_blocks_price_movement: None,
        correlation_note: Some("no block calendar given".into()),
    };
    if let Some((arb, movement)) = &inputs.daily {
        if arb.start() != movement.start() || arb.len() != movement.len() {
            return Err(MetricsError::Domain("daily series cover different days".into()));
        }
        daily.first_day = Some(arb.start());
        daily.last_day = (!arb.is_empty()).then(|| arb.day(arb.len() - 1));
        match pearson(arb, movement) {
            Ok(r) => {
                daily.correlation_arb_blocks_price_movement = Some(r);
                daily.correlation_note = None;
            }
            Err(e) => daily.correlation_note = Some(e.to_string()),
        }
    }
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        from_block: inputs.from_block,
        to_block: inputs.to_block,
        thresholds: inputs.thresholds.clone(),
        routing: routing_summary(&inputs.audits),
        arbitrage: arb_stats(&inputs.opportunities, &inputs.runs, inputs.blocks_scanned),
        daily,
    })
}

#[derive(Serialize)]
struct DailyRow {
    day: NaiveDate,
    arb_blocks: Option<u64>,
    price_movement_pct: Option<f64>,
}

#[derive(Serialize)]
struct GainRow<'a> {
    block: u64,
    tx_index: u64,
    log_index: u64,
    tx_hash: &'a str,
    pool_id: &'a str,
    token_in: &'a str,
    token_out: &'a str,
    amount_in: String,
    original_output: String,
    optimal_output: String,
    gain_tokens: String,
    gain_pct: f64,
    gain_usd: f64,
    paths_used: usize,
    optimizable: bool,
}

#[derive(Serialize)]
struct OpportunityRow<'a> {
    block: u64,
    cycle_key: &'a str,
    pools: String,
    alpha_star: f64,
    profit: f64,
    relative_profit_pct: f64,
    profit_usd: f64,
}

fn write_csv<T: Serialize>(path: &Path, headers: &[&str], rows: impl IntoIterator<Item = T>) -> Result<(), MetricsError> {
    let csv_err = |e: csv::Error| MetricsError::Csv { path: path.to_path_buf(), message: e.to_string() };
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(csv_err)?;
    w.write_record(headers).map_err(csv_err)?;
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| MetricsError::io(path, e))
}

/// Writes `report.json`, `daily_series.csv`, `gains.csv` and
/// `opportunities.csv` into `out_dir` and returns their paths.
pub fn emit_report(report: &Report, inputs: &ReportInputs, out_dir: &Path) -> Result<Vec<PathBuf>, MetricsError> {
    fs::create_dir_all(out_dir).map_err(|e| MetricsError::io(out_dir, e))?;

    let json_path = out_dir.join("report.json");
    let file = File::create(&json_path).map_err(|e| MetricsError::io(&json_path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, report).map_err(|e| MetricsError::io(&json_path, e.into()))?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(|e| MetricsError::io(&json_path, e))?;

    let daily_path = out_dir.join("daily_series.csv");
    let daily_rows: Vec<DailyRow> = match &inputs.daily {
        Some((arb, movement)) => arb
            .iter()
            .zip(movement.values())
            .map(|((day, n), m)| DailyRow { day, arb_blocks: n.map(|v| v as u64), price_movement_pct: *m })
            .collect(),
        None => Vec::new(),
    };
    write_csv(&daily_path, &["day", "arb_blocks", "price_movement_pct"], daily_rows)?;

    let gains_path = out_dir.join("gains.csv");
    write_csv(
        &gains_path,
        &[
            "block",
            "tx_index",
            "log_index",
            "tx_hash",
            "pool_id",
            "token_in",
            "token_out",
            "amount_in",
            "original_output",
            "optimal_output",
            "gain_tokens",
            "gain_pct",
            "gain_usd",
            "paths_used",
            "optimizable",
        ],
        inputs.audits.iter().map(|a| GainRow {
            block: a.block,
            tx_index: a.tx_index,
            log_index: a.log_index,
            tx_hash: &a.tx_hash,
            pool_id: &a.pool_id.0,
            token_in: &a.token_in,
            token_out: &a.token_out,
            amount_in: a.amount_in.to_string(),
            original_output: a.original_output.to_string(),
            optimal_output: a.optimal_output.to_string(),
            gain_tokens: a.gain_tokens.to_string(),
            gain_pct: a.gain_pct,
            gain_usd: a.gain_usd,
            paths_used: a.paths_used,
            optimizable: a.optimizable,
        }),
    )?;

    let opp_path = out_dir.join("opportunities.csv");
    write_csv(
        &opp_path,
        &["block", "cycle_key", "pools", "alpha_star", "profit", "relative_profit_pct", "profit_usd"],
        inputs.opportunities.iter().map(|o| OpportunityRow {
            block: o.block,
            cycle_key: &o.cycle_key,
            pools: o.pools.iter().map(|p| p.0.as_str()).collect::<Vec<_>>().join("|"),
            alpha_star: o.alpha_star,
            profit: o.profit,
            relative_profit_pct: o.relative_profit_pct,
            profit_usd: o.profit_usd,
        }),
    )?;

    Ok(vec![json_path, daily_path, gains_path, opp_path])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_has_headers_only() {
        let dir = tempfile::tempdir().unwrap();
        let inputs = ReportInputs { price_token: "ETH".into(), ..Default::default() };
        let report = build_report(&inputs).unwrap();
        let files = emit_report(&report, &inputs, dir.path()).unwrap();
        assert_eq!(files.len(), 4);
        assert_eq!(fs::read_to_string(dir.path().join("daily_series.csv")).unwrap(), "day,arb_blocks,price_movement_pct\n");
        assert_eq!(
            fs::read_to_string(dir.path().join("opportunities.csv")).unwrap(),
            "block,cycle_key,pools,alpha_star,profit,relative_profit_pct,profit_usd\n"
        );
        let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&files[0]).unwrap()).unwrap();
        assert_eq!(json["schema_version"], 1);
        assert_eq!(json["routing"]["gains"]["status"], "empty");
        assert_eq!(json["thresholds"]["min_trade_usd"], 30000.0);
    }

    #[test]
    fn rerun_is_byte_identical() {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let start: NaiveDate = "2021-01-01".parse().unwrap();
        let inputs = ReportInputs {
            price_token: "ETH".into(),
            daily: Some((
                DailySeries::new(start, vec![Some(1.0), Some(0.0), Some(3.0)]),
                DailySeries::new(start, vec![Some(4.5), None, Some(21.0)]),
            )),
            ..Default::default()
        };
        for dir in [&a, &b] {
            emit_report(&build_report(&inputs).unwrap(), &inputs, dir.path()).unwrap();
        }
        for name in ["report.json", "daily_series.csv", "gains.csv", "opportunities.csv"] {
            assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap());
        }
        assert_eq!(
            fs::read_to_string(a.path().join("daily_series.csv")).unwrap(),
            "day,arb_blocks,price_movement_pct\n2021-01-01,1,4.5\n2021-01-02,0,\n2021-01-03,3,21.0\n"
        );
    }
}
