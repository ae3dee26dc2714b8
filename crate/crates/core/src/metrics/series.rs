use std::collections::BTreeSet;

use chrono::{Days, NaiveDate};

use super::MetricsError;
use crate::ingest::{BlockCalendar, PriceTable};

/// One value per UTC day over a contiguous range. Days without data hold
/// `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct DailySeries {
    start: NaiveDate,
    values: Vec<Option<f64>>,
}

impl DailySeries {
    pub fn new(start: NaiveDate, values: Vec<Option<f64>>) -> Self {
        DailySeries { start, values }
    }

    /// A series over `first..=last` filled with `value`.
    pub fn filled(first: NaiveDate, last: NaiveDate, value: Option<f64>) -> Result<Self, MetricsError> {
        if last < first {
            return Err(MetricsError::Domain(format!("day range {first}..{last} is empty")));
        }
        let len = (last - first).num_days() as usize + 1;
        Ok(DailySeries { start: first, values: vec![value; len] })
    }

    pub fn start(&self) -> NaiveDate {
        self.start
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn day(&self, index: usize) -> NaiveDate {
        self.start + Days::new(index as u64)
    }

    pub fn index_of(&self, day: NaiveDate) -> Option<usize> {
        let i = (day - self.start).num_days();
        (i >= 0 && (i as usize) < self.values.len()).then_some(i as usize)
    }

    pub fn get(&self, day: NaiveDate) -> Option<f64> {
        self.index_of(day).and_then(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (NaiveDate, Option<f64>)> + '_ {
        self.values.iter().enumerate().map(|(i, v)| (self.day(i), *v))
    }
}

/// `100·(high − low)/low`.
pub fn price_movement(high: f64, low: f64) -> Result<f64, MetricsError> {
    if !(low > 0.0 && high >= low && high.is_finite()) {
        return Err(MetricsError::Domain(format!("price range high={high} low={low} is invalid")));
    }
    Ok(100.0 * (high - low) / low)
}

/// Daily price movement of `token`; days without a high/low are `None`.
pub fn daily_price_movement(
    prices: &PriceTable,
    token: &str,
    first: NaiveDate,
    last: NaiveDate,
) -> Result<DailySeries, MetricsError> {
    let mut series = DailySeries::filled(first, last, None)?;
    for i in 0..series.len() {
        if let Some((high, low)) = prices.range(token, series.day(i)) {
            series.values[i] = Some(price_movement(high, low)?);
        }
    }
    Ok(series)
}

/// Per day, the number of distinct blocks that had at least one opportunity.
pub fn daily_arb_blocks(
    blocks: impl IntoIterator<Item = u64>,
    calendar: &BlockCalendar,
    first: NaiveDate,
    last: NaiveDate,
) -> Result<DailySeries, MetricsError> {
    let mut series = DailySeries::filled(first, last, Some(0.0))?;
    let distinct: BTreeSet<u64> = blocks.into_iter().collect();
    for block in distinct {
        let day = calendar.day_of(block).ok_or(MetricsError::UnmappedBlock(block))?;
        let i = series
            .index_of(day)
            .ok_or_else(|| MetricsError::Domain(format!("block {block} falls on {day}, outside {first}..{last}")))?;
        series.values[i] = Some(series.values[i].unwrap_or(0.0) + 1.0);
    }
    Ok(series)
}

/// Sample Pearson correlation over the days where both series have values.
pub fn pearson(x: &DailySeries, y: &DailySeries) -> Result<f64, MetricsError> {
    if x.start != y.start || x.len() != y.len() {
        return Err(MetricsError::Domain("series cover different days".into()));
    }
    let pairs: Vec<(f64, f64)> = x.values.iter().zip(&y.values).filter_map(|(a, b)| Some(((*a)?, (*b)?))).collect();
    pearson_pairs(&pairs)
}

pub fn pearson_pairs(pairs: &[(f64, f64)]) -> Result<f64, MetricsError> {
    if pairs.len() < 2 {
        return Err(MetricsError::UndefinedCorrelation(format!("{} paired points", pairs.len())));
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(a, b) in pairs {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(MetricsError::UndefinedCorrelation("constant series".into()));
    }
    // sqrt(fl(s·s)) == s exactly, so (anti)identical series give exactly ±1.
    let product = sxx * syy;
    let denom = if product.is_normal() { product.sqrt() } else { sxx.sqrt() * syy.sqrt() };
    Ok((sxy / denom).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    fn series(v: &[f64]) -> DailySeries {
        DailySeries::new(d("2021-01-01"), v.iter().map(|x| Some(*x)).collect())
    }

    #[test]
    fn price_movement_cases() {
        assert_eq!(price_movement(5.0, 5.0).unwrap(), 0.0);
        assert!((price_movement(1.2 * 1500.0, 1500.0).unwrap() - 20.0).abs() < 1e-12);
        assert_eq!(price_movement(150.0, 100.0).unwrap(), 50.0);
        assert!(price_movement(1.0, 0.0).is_err());
        assert!(price_movement(1.0, 2.0).is_err());
    }

    #[test]
    fn arb_blocks_count_distinct_blocks_per_day() {
        let mut cal = BlockCalendar::new();
        cal.insert_day(100, d("2021-01-01"));
        cal.insert_day(105, d("2021-01-02"));
        cal.insert_day(110, d("2021-01-03"));
        let s = daily_arb_blocks([101, 101, 101, 104, 105, 109], &cal, d("2021-01-01"), d("2021-01-03")).unwrap();
        assert_eq!(s.values(), &[Some(2.0), Some(2.0), Some(0.0)]);
        let empty = daily_arb_blocks([], &cal, d("2021-01-01"), d("2021-01-03")).unwrap();
        assert_eq!(empty.values(), &[Some(0.0); 3]);
        assert!(matches!(
            daily_arb_blocks([99], &cal, d("2021-01-01"), d("2021-01-03")),
            Err(MetricsError::UnmappedBlock(99))
        ));
    }

    #[test]
    fn pearson_identities() {
        let x = series(&[1.0, 2.0, 4.0, 7.0]);
        assert_eq!(pearson(&x, &x).unwrap(), 1.0);
        let neg = series(&[-1.0, -2.0, -4.0, -7.0]);
        assert_eq!(pearson(&x, &neg).unwrap(), -1.0);
        assert!(matches!(pearson(&x, &series(&[3.0; 4])), Err(MetricsError::UndefinedCorrelation(_))));
        assert!(pearson(&series(&[1.0]), &series(&[2.0])).is_err());
    }

    #[test]
    fn pearson_skips_missing_days() {
        let x = DailySeries::new(d("2021-01-01"), vec![Some(1.0), None, Some(2.0), Some(3.0)]);
        let y = series(&[2.0, 100.0, 4.0, 6.0]);
        assert!((pearson(&x, &y).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn series_days() {
        let s = DailySeries::filled(d("2020-12-31"), d("2021-01-02"), None).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.day(2), d("2021-01-02"));
        assert_eq!(s.index_of(d("2021-01-03")), None);
        assert!(DailySeries::filled(d("2021-01-02"), d("2021-01-01"), None).is_err());
    }
}
