use std::fmt::Display;

use ammscope_core::arb::ArbError;
use ammscope_core::ingest::IngestError;
use ammscope_core::metrics::MetricsError;
use ammscope_core::route::RouteError;

pub const OTHER: u8 = 1;
pub const CONFIG: u8 = 3;
pub const IO: u8 = 4;
pub const SCHEMA: u8 = 5;
pub const DATA: u8 = 6;
pub const FLAGS: u8 = 7;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn new(code: u8, msg: impl Display) -> Self {
        Failure { code, error: anyhow::anyhow!("{msg}") }
    }
}

pub type CmdResult<T> = Result<T, Failure>;

pub fn config(msg: impl Display) -> Failure {
    Failure::new(CONFIG, msg)
}

impl From<IngestError> for Failure {
    fn from(e: IngestError) -> Self {
        let code = match &e {
            IngestError::Io { .. } => IO,
            IngestError::Config(_) => CONFIG,
            IngestError::Parse { .. } | IngestError::Duplicate { .. } | IngestError::Invalid { .. } => SCHEMA,
        };
        Failure { code, error: e.into() }
    }
}

impl From<MetricsError> for Failure {
    fn from(e: MetricsError) -> Self {
        let code = match &e {
            MetricsError::Io { .. } | MetricsError::Csv { .. } => IO,
            MetricsError::UnmappedBlock(_) => DATA,
            MetricsError::Domain(_) | MetricsError::UndefinedCorrelation(_) => OTHER,
        };
        Failure { code, error: e.into() }
    }
}

impl From<RouteError> for Failure {
    fn from(e: RouteError) -> Self {
        let code = if matches!(e, RouteError::MissingPrice { .. }) { DATA } else { OTHER };
        Failure { code, error: e.into() }
    }
}

impl From<ArbError> for Failure {
    fn from(e: ArbError) -> Self {
        let code = if matches!(e, ArbError::MissingPrice { .. }) { DATA } else { OTHER };
        Failure { code, error: e.into() }
    }
}

pub trait IoContext<T> {
    fn io_at(self, path: &std::path::Path) -> CmdResult<T>;
}

impl<T> IoContext<T> for std::io::Result<T> {
    fn io_at(self, path: &std::path::Path) -> CmdResult<T> {
        self.map_err(|e| Failure::new(IO, format!("{}: {e}", path.display())))
    }
}
