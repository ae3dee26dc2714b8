use std::collections::BTreeMap;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::{parse_jsonl, read_text, IngestError};

/// One line of the prices file: the day's reference USD price of a token,
/// optionally with the day's high and low.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriceRow {
    pub token: String,
    pub day: NaiveDate,
    pub price: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub high: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub low: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PriceTable {
    prices: BTreeMap<(String, NaiveDate), f64>,
    ranges: BTreeMap<(String, NaiveDate), (f64, f64)>,
}

impl PriceTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, token: &str, day: NaiveDate, price: f64) {
        self.prices.insert((token.to_string(), day), price);
    }

    pub fn insert_range(&mut self, token: &str, day: NaiveDate, high: f64, low: f64) {
        self.ranges.insert((token.to_string(), day), (high, low));
    }

    pub fn price(&self, token: &str, day: NaiveDate) -> Option<f64> {
        self.prices.get(&(token.to_string(), day)).copied()
    }

    /// `(high, low)` of the day, when recorded.
    pub fn range(&self, token: &str, day: NaiveDate) -> Option<(f64, f64)> {
        self.ranges.get(&(token.to_string(), day)).copied()
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    pub fn rows(&self) -> Vec<PriceRow> {
        self.prices
            .iter()
            .map(|((token, day), price)| {
                let range = self.ranges.get(&(token.clone(), *day));
                PriceRow {
                    token: token.clone(),
                    day: *day,
                    price: *price,
                    high: range.map(|r| r.0),
                    low: range.map(|r| r.1),
                }
            })
            .collect()
    }
}

pub fn parse_prices(source_name: &str, text: &str) -> Result<PriceTable, IngestError> {
    let rows: Vec<(usize, PriceRow)> = parse_jsonl(source_name, text)?;
    let mut table = PriceTable::new();
    for (line, row) in rows {
        let invalid = |message: String| IngestError::Invalid { source_name: source_name.to_string(), line, message };
        if !(row.price.is_finite() && row.price > 0.0) {
            return Err(invalid(format!("price {} must be positive", row.price)));
        }
        if table.price(&row.token, row.day).is_some() {
            return Err(IngestError::Duplicate {
                source_name: source_name.to_string(),
                line,
                key: format!("({}, {})", row.token, row.day),
            });
        }
        table.insert(&row.token, row.day, row.price);
        match (row.high, row.low) {
            (Some(high), Some(low)) => {
                if !(low > 0.0 && high.is_finite() && high >= low) {
                    return Err(invalid(format!("need high >= low > 0, got high {high}, low {low}")));
                }
                table.insert_range(&row.token, row.day, high, low);
            }
            (None, None) => {}
            _ => return Err(invalid("high and low must be given together".into())),
        }
    }
    Ok(table)
}

pub fn read_prices(path: &Path) -> Result<PriceTable, IngestError> {
    parse_prices(&path.display().to_string(), &read_text(path)?)
}
