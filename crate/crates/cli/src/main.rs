//! `ammscope`: routing audits, cyclic arbitrage scans, reports and dataset
//! validation over file-based CPMM pool data.

mod commands;
mod fail;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  unexpected failure
  2  usage error (unknown flag, bad value)
  3  configuration conflict (empty block range, wrong network kind, bad threshold)
  4  input file missing or unreadable, or output not writable
  5  input schema or parse error
  6  missing data (no USD price for a token/day, block not in the calendar)
  7  validate --fail-on-flags found inconsistent records

Every flag can also be set through an AMMSCOPE_* environment variable,
e.g. AMMSCOPE_EVENTS or AMMSCOPE_MIN_GAIN_USD; flags take precedence.";

#[derive(Parser, Debug)]
#[command(name = "ammscope", version, about, after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compare historical trades with the optimal split across independent paths.
    RouteAudit(RouteAuditArgs),
    /// Scan blocks for profitable pool cycles and track how long they last.
    ArbScan(ArbScanArgs),
    /// Aggregate audit and scan outputs into report files.
    Report(ReportArgs),
    /// Check swap events against the swap formula and the reserve records.
    Validate(ValidateArgs),
    /// Write a deterministic synthetic dataset.
    Synth(SynthArgs),
}

#[derive(Args, Debug, Clone)]
struct GraphArgs {
    /// Pool graph JSON; the bundled default graph when omitted.
    #[arg(long, env = "AMMSCOPE_GRAPH")]
    graph: Option<PathBuf>,
    /// Network name from the graph; the first network of the right kind when omitted.
    #[arg(long, env = "AMMSCOPE_NETWORK")]
    network: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct RangeArgs {
    #[arg(long, env = "AMMSCOPE_FROM_BLOCK")]
    from_block: Option<u64>,
    #[arg(long, env = "AMMSCOPE_TO_BLOCK")]
    to_block: Option<u64>,
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Output directory.
    #[arg(long, env = "AMMSCOPE_OUT", default_value = "out")]
    out: PathBuf,
    /// Worker threads; 0 uses every core.
    #[arg(long, env = "AMMSCOPE_JOBS", default_value_t = 0)]
    jobs: usize,
}

#[derive(Args, Debug)]
struct RouteAuditArgs {
    #[arg(long, env = "AMMSCOPE_EVENTS")]
    events: PathBuf,
    #[arg(long, env = "AMMSCOPE_RESERVES")]
    reserves: PathBuf,
    #[arg(long, env = "AMMSCOPE_PRICES")]
    prices: PathBuf,
    /// Block timestamps (JSON lines of {block, timestamp}).
    #[arg(long, env = "AMMSCOPE_BLOCKS")]
    blocks: PathBuf,
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    range: RangeArgs,
    #[arg(long, env = "AMMSCOPE_MIN_TRADE_USD", default_value_t = 30_000.0)]
    min_trade_usd: f64,
    #[arg(long, env = "AMMSCOPE_MIN_GAIN_USD", default_value_t = 30.0)]
    min_gain_usd: f64,
    /// Share of a trade above which a path counts as used.
    #[arg(long, env = "AMMSCOPE_PATH_USAGE", default_value_t = 0.001)]
    path_usage: f64,
    /// Overrides the network's hop limit.
    #[arg(long, env = "AMMSCOPE_MAX_HOPS")]
    max_hops: Option<usize>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct ArbScanArgs {
    #[arg(long, env = "AMMSCOPE_RESERVES")]
    reserves: PathBuf,
    #[arg(long, env = "AMMSCOPE_PRICES")]
    prices: PathBuf,
    #[arg(long, env = "AMMSCOPE_BLOCKS")]
    blocks: PathBuf,
    #[command(flatten)]
    graph: GraphArgs,
    /// Defaults to the blocks covered by the reserve records.
    #[command(flatten)]
    range: RangeArgs,
    #[arg(long, env = "AMMSCOPE_MIN_PROFIT_USD", default_value_t = 30.0)]
    min_profit_usd: f64,
    /// Overrides the network's cycle length limit.
    #[arg(long, env = "AMMSCOPE_MAX_CYCLE_LEN")]
    max_cycle_len: Option<usize>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Directory holding audits.jsonl and audit_summary.json.
    #[arg(long, env = "AMMSCOPE_AUDIT_DIR")]
    audit_dir: Option<PathBuf>,
    /// Directory holding opportunities.jsonl, runs.jsonl and scan_summary.json.
    #[arg(long, env = "AMMSCOPE_SCAN_DIR")]
    scan_dir: Option<PathBuf>,
    /// Daily high/low prices for the price movement series.
    #[arg(long, env = "AMMSCOPE_PRICES")]
    prices: Option<PathBuf>,
    #[arg(long, env = "AMMSCOPE_BLOCKS")]
    blocks: Option<PathBuf>,
    #[arg(long, env = "AMMSCOPE_PRICE_TOKEN", default_value = "ETH")]
    price_token: String,
    #[command(flatten)]
    range: RangeArgs,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long, env = "AMMSCOPE_EVENTS")]
    events: PathBuf,
    #[arg(long, env = "AMMSCOPE_RESERVES")]
    reserves: PathBuf,
    #[arg(long, env = "AMMSCOPE_GRAPH")]
    graph: Option<PathBuf>,
    /// Largest accepted relative deviation of a recorded output.
    #[arg(long, env = "AMMSCOPE_TOLERANCE", default_value_t = 1e-6)]
    tolerance: f64,
    #[arg(long, env = "AMMSCOPE_FAIL_ON_FLAGS")]
    fail_on_flags: bool,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long, env = "AMMSCOPE_SEED", default_value_t = 7)]
    seed: u64,
    #[arg(long = "num-blocks", env = "AMMSCOPE_NUM_BLOCKS", default_value_t = 100)]
    num_blocks: u64,
    #[arg(long, env = "AMMSCOPE_FIRST_BLOCK", default_value_t = 11_565_020)]
    first_block: u64,
    #[arg(long, env = "AMMSCOPE_MAX_SWAPS", default_value_t = 4)]
    max_swaps: u32,
    #[command(flatten)]
    run: RunArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::RouteAudit(a) => commands::route_audit(&a),
        Command::ArbScan(a) => commands::arb_scan(&a),
        Command::Report(a) => commands::report(&a),
        Command::Validate(a) => commands::validate(&a),
        Command::Synth(a) => commands::synth(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.error);
            ExitCode::from(f.code)
        }
    }
}
