//! Constant-product AMM analysis: exact swap math, multi-path routing,
//! cyclic arbitrage scanning, dataset ingestion and reporting.

pub mod amount;
pub mod arb;
pub mod cpmm;
pub mod effective;
pub mod ingest;
pub mod metrics;
pub mod route;
pub mod snapshot;
pub mod synth;
