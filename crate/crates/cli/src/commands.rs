use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use ammscope_core::arb::{
    enumerate_cycles, mean_duration, scan_block, track_durations, BlockKeys, CycleOpportunity, CycleSetConfig,
    OpportunityRecord, OpportunityRun,
};
use ammscope_core::cpmm::PoolId;
use ammscope_core::ingest::{
    filter_independent_swaps, read_events, read_graph, read_jsonl, read_prices, read_reserves, validate_consistency,
    write_jsonl, BlockCalendar, Network, PoolGraph, SnapshotProvider,
};
use ammscope_core::metrics::{
    build_report, daily_arb_blocks, daily_price_movement, emit_report, ReportInputs, ReportThresholds,
};
use ammscope_core::route::{audit_trade, trade_usd_value, AuditOutcome, AuditResult, AuditThresholds, PathSetConfig};
use ammscope_core::synth::{generate, write_dataset, SynthConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fail::{config, CmdResult, Failure, IoContext, DATA, FLAGS};
use crate::{ArbScanArgs, GraphArgs, RangeArgs, ReportArgs, RouteAuditArgs, RunArgs, SynthArgs, ValidateArgs};

#[derive(Debug, Serialize, Deserialize)]
struct Unauditable {
    block: u64,
    tx_hash: String,
    reason: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct AuditSummary {
    from_block: Option<u64>,
    to_block: Option<u64>,
    network: String,
    max_hops: usize,
    thresholds: AuditThresholds,
    events_total: usize,
    dropped_multi_swap: usize,
    outside_range: usize,
    below_min_trade: usize,
    audited: usize,
    optimizable: usize,
    unauditable: Vec<Unauditable>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ScanSummary {
    from_block: u64,
    to_block: u64,
    network: String,
    max_cycle_len: usize,
    min_profit_usd: f64,
    cycles: usize,
    blocks_scanned: u64,
    /// Blocks where some pool of the network had no reserves yet.
    blocks_unscanned: u64,
    blocks_with_arb: usize,
    opportunities: usize,
    runs: usize,
    mean_duration_blocks: Option<f64>,
}

fn load_graph(args: &GraphArgs) -> CmdResult<PoolGraph> {
    match &args.graph {
        Some(p) => Ok(read_graph(p)?),
        None => Ok(PoolGraph::default_graph()),
    }
}

fn path_network(graph: &PoolGraph, name: Option<&str>) -> CmdResult<(String, PathSetConfig)> {
    let found = match name {
        Some(n) => match graph.network(n) {
            Some(Network::Paths(c)) => Some((n.to_string(), c.clone())),
            Some(Network::Cycles(_)) => return Err(config(format!("network {n} is a cycle network"))),
            None => return Err(config(format!("unknown network {n}"))),
        },
        None => graph.networks().find_map(|(n, net)| match net {
            Network::Paths(c) => Some((n.clone(), c.clone())),
            Network::Cycles(_) => None,
        }),
    };
    Ok(found.unwrap_or_else(|| ("all-pools".into(), PathSetConfig::new(graph.pool_ids()))))
}

fn cycle_network(graph: &PoolGraph, name: Option<&str>) -> CmdResult<(String, CycleSetConfig)> {
    let found = match name {
        Some(n) => match graph.network(n) {
            Some(Network::Cycles(c)) => Some((n.to_string(), c.clone())),
            Some(Network::Paths(_)) => return Err(config(format!("network {n} is a path network"))),
            None => return Err(config(format!("unknown network {n}"))),
        },
        None => graph.networks().find_map(|(n, net)| match net {
            Network::Cycles(c) => Some((n.clone(), c.clone())),
            Network::Paths(_) => None,
        }),
    };
    Ok(found.unwrap_or_else(|| ("all-pools".into(), CycleSetConfig::new(graph.pool_ids()))))
}

fn check_range(range: &RangeArgs) -> CmdResult<()> {
    if let (Some(from), Some(to)) = (range.from_block, range.to_block) {
        if from > to {
            return Err(config(format!("empty block range {from}..={to}")));
        }
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> CmdResult<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(config(format!("{name} must be positive, got {v}")))
    }
}

fn thread_pool(run: &RunArgs) -> CmdResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(run.jobs)
        .build()
        .map_err(|e| Failure::new(crate::fail::OTHER, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CmdResult<()> {
    let mut w = BufWriter::new(File::create(path).io_at(path)?);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Failure::new(crate::fail::IO, e))?;
    w.write_all(b"\n").and_then(|_| w.flush()).io_at(path)
}

fn write_lines<T: Serialize>(path: &Path, rows: &[T]) -> CmdResult<()> {
    let mut w = BufWriter::new(File::create(path).io_at(path)?);
    write_jsonl(&mut w, rows).and_then(|_| w.flush()).io_at(path)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CmdResult<T> {
    let text = fs::read_to_string(path).io_at(path)?;
    serde_json::from_str(&text).map_err(|e| Failure::new(crate::fail::SCHEMA, format!("{}: {e}", path.display())))
}

fn day_of(calendar: &BlockCalendar, block: u64) -> CmdResult<chrono::NaiveDate> {
    calendar
        .day_of(block)
        .ok_or_else(|| Failure::new(DATA, format!("block {block} is outside the block calendar")))
}

#[allow(clippy::large_enum_variant)]
enum Step {
    BelowThreshold,
    Done(AuditOutcome),
}

pub fn route_audit(args: &RouteAuditArgs) -> CmdResult<()> {
    check_range(&args.range)?;
    check_positive("--min-trade-usd", args.min_trade_usd)?;
    check_positive("--min-gain-usd", args.min_gain_usd)?;
    check_positive("--path-usage", args.path_usage)?;
    let graph = load_graph(&args.graph)?;
    let (network, mut cfg) = path_network(&graph, args.graph.network.as_deref())?;
    if let Some(h) = args.max_hops {
        if h == 0 {
            return Err(config("--max-hops must be at least 1"));
        }
        cfg.max_hops = h;
    }
    let thresholds = AuditThresholds {
        min_trade_usd: args.min_trade_usd,
        min_gain_usd: args.min_gain_usd,
        path_usage: args.path_usage,
    };

    let events = read_events(&args.events)?;
    let reserves = read_reserves(&args.reserves)?;
    let prices = read_prices(&args.prices)?;
    let calendar = BlockCalendar::read(&args.blocks)?;
    let provider = SnapshotProvider::build(&reserves, &graph);

    let events_total = events.len();
    let filtered = filter_independent_swaps(&events);
    let in_range = |b: u64| args.range.from_block.is_none_or(|f| b >= f) && args.range.to_block.is_none_or(|t| b <= t);
    let selected: Vec<_> = filtered.kept.iter().filter(|e| in_range(e.block)).collect();
    let outside_range = filtered.kept.len() - selected.len();

    let pool = thread_pool(&args.run)?;
    let steps: Vec<CmdResult<Step>> = pool.install(|| {
        selected
            .par_iter()
            .map(|ev| {
                let day = day_of(&calendar, ev.block)?;
                if trade_usd_value(ev, &graph, &prices, day)? < thresholds.min_trade_usd {
                    return Ok(Step::BelowThreshold);
                }
                let pools: BTreeSet<&PoolId> = cfg.allowed_pools.iter().chain([&ev.pool_id]).collect();
                let snapshot = provider.snapshot_of(ev.block, pools);
                Ok(Step::Done(audit_trade(ev, &snapshot, &graph, &cfg, &thresholds, &prices, day)?))
            })
            .collect()
    });

    let mut audits: Vec<AuditResult> = Vec::new();
    let mut unauditable = Vec::new();
    let mut below_min_trade = 0;
    for step in steps {
        match step? {
            Step::BelowThreshold => below_min_trade += 1,
            Step::Done(AuditOutcome::Audited(r)) => audits.push(r),
            Step::Done(AuditOutcome::Unauditable { block, tx_hash, reason }) => {
                unauditable.push(Unauditable { block, tx_hash, reason })
            }
        }
    }

    let out = &args.run.out;
    fs::create_dir_all(out).io_at(out)?;
    write_lines(&out.join("audits.jsonl"), &audits)?;
    let summary = AuditSummary {
        from_block: args.range.from_block,
        to_block: args.range.to_block,
        network,
        max_hops: cfg.max_hops,
        thresholds,
        events_total,
        dropped_multi_swap: filtered.dropped,
        outside_range,
        below_min_trade,
        audited: audits.len(),
        optimizable: audits.iter().filter(|a| a.optimizable).count(),
        unauditable,
    };
    write_json(&out.join("audit_summary.json"), &summary)?;
    eprintln!(
        "audited {} of {} trades; {} optimizable; {} unauditable",
        summary.audited,
        events_total,
        summary.optimizable,
        summary.unauditable.len()
    );
    Ok(())
}

pub fn arb_scan(args: &ArbScanArgs) -> CmdResult<()> {
    check_range(&args.range)?;
    check_positive("--min-profit-usd", args.min_profit_usd)?;
    let graph = load_graph(&args.graph)?;
    let (network, mut cfg) = cycle_network(&graph, args.graph.network.as_deref())?;
    if let Some(n) = args.max_cycle_len {
        if n < 2 {
            return Err(config("--max-cycle-len must be at least 2"));
        }
        cfg.max_cycle_len = n;
    }
    let reserves = read_reserves(&args.reserves)?;
    let prices = read_prices(&args.prices)?;
    let calendar = BlockCalendar::read(&args.blocks)?;
    let provider = SnapshotProvider::build(&reserves, &graph);

    let recorded = provider.record_blocks();
    let from = args.range.from_block.or_else(|| recorded.first().map(|b| b + 1));
    let to = args.range.to_block.or_else(|| recorded.last().copied());
    let (Some(from), Some(to)) = (from, to) else {
        return Err(config("no block range given and the reserve file is empty"));
    };
    if from > to {
        return Err(config(format!("empty block range {from}..={to}")));
    }

    let cycles = enumerate_cycles(&graph, &cfg);
    let needed: BTreeSet<&PoolId> = cfg.allowed_pools.iter().filter(|p| graph.pool(p).is_some()).collect();

    let pool = thread_pool(&args.run)?;
    let scans: Vec<CmdResult<(u64, Option<Vec<CycleOpportunity>>)>> = pool.install(|| {
        (from..=to)
            .into_par_iter()
            .map(|block| {
                let snapshot = provider.snapshot_of(block, needed.iter().copied());
                if snapshot.len() < needed.len() {
                    return Ok((block, None));
                }
                let day = day_of(&calendar, block)?;
                Ok((block, Some(scan_block(&snapshot, &cycles, &prices, day, args.min_profit_usd)?)))
            })
            .collect()
    });

    let mut records: Vec<OpportunityRecord> = Vec::new();
    let mut keys = Vec::new();
    let mut unscanned = 0;
    for scan in scans {
        let (block, found) = scan?;
        match found {
            Some(opps) => {
                keys.push(BlockKeys {
                    block,
                    keys: Some(opps.iter().map(|o| o.cycle.canonical_key.clone()).collect()),
                });
                records.extend(opps.iter().map(|o| o.record()));
            }
            None => {
                unscanned += 1;
                keys.push(BlockKeys { block, keys: None });
            }
        }
    }
    let runs = track_durations(&keys);
    let arb_blocks: BTreeSet<u64> = records.iter().map(|r| r.block).collect();

    let out = &args.run.out;
    fs::create_dir_all(out).io_at(out)?;
    write_lines(&out.join("opportunities.jsonl"), &records)?;
    write_lines(&out.join("runs.jsonl"), &runs)?;
    let summary = ScanSummary {
        from_block: from,
        to_block: to,
        network,
        max_cycle_len: cfg.max_cycle_len,
        min_profit_usd: args.min_profit_usd,
        cycles: cycles.len(),
        blocks_scanned: to - from + 1 - unscanned,
        blocks_unscanned: unscanned,
        blocks_with_arb: arb_blocks.len(),
        opportunities: records.len(),
        runs: runs.len(),
        mean_duration_blocks: mean_duration(&runs),
    };
    write_json(&out.join("scan_summary.json"), &summary)?;
    eprintln!(
        "scanned {} blocks over {} cycles; {} blocks with opportunities; {} runs",
        summary.blocks_scanned, summary.cycles, summary.blocks_with_arb, summary.runs
    );
    Ok(())
}

pub fn report(args: &ReportArgs) -> CmdResult<()> {
    check_range(&args.range)?;
    if args.audit_dir.is_none() && args.scan_dir.is_none() {
        return Err(config("give --audit-dir, --scan-dir or both"));
    }
    let mut inputs = ReportInputs { price_token: args.price_token.clone(), ..Default::default() };
    let mut thresholds = ReportThresholds::default();
    let mut range = (None, None);

    if let Some(dir) = &args.audit_dir {
        inputs.audits = read_jsonl(&dir.join("audits.jsonl"))?;
        let s: AuditSummary = read_json(&dir.join("audit_summary.json"))?;
        thresholds.min_trade_usd = s.thresholds.min_trade_usd;
        thresholds.min_gain_usd = s.thresholds.min_gain_usd;
        thresholds.path_usage = s.thresholds.path_usage;
        thresholds.max_hops = s.max_hops;
        range = (s.from_block, s.to_block);
    }
    if let Some(dir) = &args.scan_dir {
        inputs.opportunities = read_jsonl::<OpportunityRecord>(&dir.join("opportunities.jsonl"))?;
        inputs.runs = read_jsonl::<OpportunityRun>(&dir.join("runs.jsonl"))?;
        let s: ScanSummary = read_json(&dir.join("scan_summary.json"))?;
        thresholds.min_profit_usd = s.min_profit_usd;
        thresholds.max_cycle_len = s.max_cycle_len;
        inputs.blocks_scanned = s.blocks_scanned;
        range = (Some(s.from_block), Some(s.to_block));
    }
    inputs.from_block = args.range.from_block.or(range.0);
    inputs.to_block = args.range.to_block.or(range.1);
    inputs.thresholds = thresholds;

    match (&args.blocks, &args.prices) {
        (Some(blocks), Some(prices)) => {
            let (Some(from), Some(to)) = (inputs.from_block, inputs.to_block) else {
                return Err(config("daily series need a block range (--from-block/--to-block or a scan summary)"));
            };
            let calendar = BlockCalendar::read(blocks)?;
            let prices = read_prices(prices)?;
            let (first, last) = (day_of(&calendar, from)?, day_of(&calendar, to)?);
            let arb = daily_arb_blocks(inputs.opportunities.iter().map(|o| o.block), &calendar, first, last)?;
            let movement = daily_price_movement(&prices, &args.price_token, first, last)?;
            inputs.daily = Some((arb, movement));
        }
        (None, None) => {}
        _ => return Err(config("--blocks and --prices must be given together")),
    }

    let report = build_report(&inputs)?;
    let files = emit_report(&report, &inputs, &args.run.out)?;
    eprintln!("wrote {} report files to {}", files.len(), args.run.out.display());
    Ok(())
}

pub fn validate(args: &ValidateArgs) -> CmdResult<()> {
    if !(args.tolerance >= 0.0 && args.tolerance.is_finite()) {
        return Err(config(format!("--tolerance must be non-negative, got {}", args.tolerance)));
    }
    let graph = match &args.graph {
        Some(p) => read_graph(p)?,
        None => PoolGraph::default_graph(),
    };
    let events = read_events(&args.events)?;
    let reserves = read_reserves(&args.reserves)?;
    let provider = SnapshotProvider::build(&reserves, &graph);
    let report = validate_consistency(&events, &provider, args.tolerance);

    let out = &args.run.out;
    fs::create_dir_all(out).io_at(out)?;
    write_json(&out.join("validation.json"), &report)?;
    eprintln!(
        "checked {} swaps: {} flagged; {} closure checks, {} mismatched",
        report.checked,
        report.flags.len(),
        report.closure_checked,
        report.closure_mismatches.len()
    );
    if args.fail_on_flags && !report.is_clean() {
        return Err(Failure::new(FLAGS, "dataset has inconsistent records"));
    }
    Ok(())
}

pub fn synth(args: &SynthArgs) -> CmdResult<()> {
    if args.num_blocks == 0 || args.first_block == 0 {
        return Err(config("--num-blocks and --first-block must be positive"));
    }
    let cfg = SynthConfig {
        seed: args.seed,
        first_block: args.first_block,
        blocks: args.num_blocks,
        max_swaps_per_block: args.max_swaps,
        ..Default::default()
    };
    let ds = generate(&cfg);
    let files = write_dataset(&ds, &args.run.out).io_at(&args.run.out)?;
    eprintln!("wrote {} files ({} swaps) to {}", files.len(), ds.events.len(), args.run.out.display());
    Ok(())
}
