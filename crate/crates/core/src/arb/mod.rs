//! Cyclic arbitrage: directed pool cycles, their closed-form optimum, block
//! scans and how long opportunities persist.

mod cycles;
mod durations;
mod scan;

use chrono::NaiveDate;
use thiserror::Error;

pub use cycles::{cycle_effective, enumerate_cycles, optimize_cycle, Cycle, CycleOptimum, CycleSetConfig};
pub use durations::{mean_duration, track_durations, BlockKeys, OpportunityRun};
pub use scan::{scan_block, CycleOpportunity, OpportunityRecord};

use crate::effective::PathError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArbError {
    #[error("missing USD price for {token} on {day}")]
    MissingPrice { token: String, day: NaiveDate },
    #[error(transparent)]
    Path(#[from] PathError),
}
