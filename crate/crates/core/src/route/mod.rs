//! Independent-path routing: candidate path sets, the water-filling split and
//! audits of historical trades.

mod audit;
mod paths;
mod solver;

use chrono::NaiveDate;
use thiserror::Error;

pub use audit::{audit_trade, pool_liquidity_usd, trade_usd_value, AuditOutcome, AuditResult, AuditThresholds, PathShare};
pub use paths::{direct_path, enumerate_paths, select_path_set, PathSetConfig};
pub use solver::{count_used_paths, optimal_split, RoutePlan};

use crate::cpmm::CpmmError;
use crate::effective::PathError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RouteError {
    #[error("input and output token are both {0}")]
    SameToken(String),
    #[error("empty path set")]
    EmptyPathSet,
    #[error("{0}")]
    Domain(String),
    #[error("missing USD price for {token} on {day}")]
    MissingPrice { token: String, day: NaiveDate },
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Math(#[from] CpmmError),
}
