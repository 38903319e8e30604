//! Daily returns and monthly realized volatility.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::NaiveDate;

use super::csvio::{HeaderIndex, Offenders};
use super::month::Month;
use crate::error::{Error, Result};

/// Months with fewer trading days than this are flagged.
pub const THIN_MONTH_DAYS: usize = 5;

/// Daily simple returns (decimal fractions) with strictly increasing dates.
#[derive(Clone, Debug, PartialEq)]
pub struct DailyReturns {
    records: Vec<(NaiveDate, f64)>,
}

impl DailyReturns {
    pub fn new(records: Vec<(NaiveDate, f64)>) -> Result<Self> {
        let mut bad = Offenders::default();
        for (i, (date, r)) in records.iter().enumerate() {
            if !r.is_finite() {
                bad.push(format!("{date}: non-finite return {r}"));
            }
            if i > 0 && records[i - 1].0 >= *date {
                bad.push(format!("{date}: dates not strictly increasing"));
            }
        }
        bad.into_result("daily returns")?;
        Ok(Self { records })
    }

    pub fn records(&self) -> &[(NaiveDate, f64)] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Writes the `date,return` layout read by [`load_daily`].
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::with_capacity(self.records.len() * 32);
        out.push_str("date,return\n");
        for (d, r) in &self.records {
            out.push_str(&format!("{},{}\n", d.format("%Y-%m-%d"), super::fmt_f64(*r)));
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}

/// Reads a `date,return` CSV (ISO-8601 dates, decimal returns).
pub fn load_daily(path: impl AsRef<Path>) -> Result<DailyReturns> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    let header = HeaderIndex::new(reader.headers()?, path)?;
    let date_col = header.require(&["date"])?[0];
    let ret_col = header.require(&["return"])?[0];
    let mut records = Vec::new();
    let mut bad = Offenders::default();
    for (i, row) in reader.records().enumerate() {
        let line = i + 2;
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                bad.push(format!("line {line}: {e}"));
                continue;
            }
        };
        let date = NaiveDate::parse_from_str(row.get(date_col).unwrap_or(""), "%Y-%m-%d");
        let ret = row.get(ret_col).unwrap_or("").parse::<f64>();
        match (date, ret) {
            (Ok(d), Ok(r)) if r.is_finite() => records.push((d, r)),
            (Ok(_), Ok(r)) => bad.push(format!("line {line}: non-finite return {r}")),
            (Err(_), _) => bad.push(format!("line {line}: unparseable date {:?}", row.get(date_col))),
            (_, Err(_)) => bad.push(format!("line {line}: unparseable return {:?}", row.get(ret_col))),
        }
    }
    bad.into_result(&path.display().to_string())?;
    DailyReturns::new(records)
}

/// Monthly natural-log realized volatility.
#[derive(Clone, Debug, PartialEq)]
pub struct MonthlyLogRv {
    pub months: Vec<Month>,
    pub log_rv: Vec<f64>,
    /// Included months with fewer than [`THIN_MONTH_DAYS`] observations.
    pub thin_months: Vec<Month>,
    /// Calendar months inside the span that had no observations.
    pub missing_months: Vec<Month>,
}

/// `log(sqrt(Σ r²))` per calendar month.
pub fn compute_monthly_log_rv(daily: &DailyReturns) -> Result<MonthlyLogRv> {
    let mut by_month: BTreeMap<Month, (f64, usize)> = BTreeMap::new();
    for &(date, r) in daily.records() {
        let e = by_month.entry(Month::from_date(date)).or_insert((0.0, 0));
        e.0 += r * r;
        e.1 += 1;
    }
    let mut out = MonthlyLogRv {
        months: Vec::with_capacity(by_month.len()),
        log_rv: Vec::with_capacity(by_month.len()),
        thin_months: Vec::new(),
        missing_months: Vec::new(),
    };
    let mut prev: Option<Month> = None;
    for (month, (sum_sq, count)) in by_month {
        if sum_sq == 0.0 {
            return Err(Error::Data(format!(
                "realized volatility is exactly zero in {month}; log is undefined"
            )));
        }
        if let Some(p) = prev {
            let mut m = p.succ();
            while m < month {
                log::warn!("no daily returns in {m}; month excluded");
                out.missing_months.push(m);
                m = m.succ();
            }
        }
        if count < THIN_MONTH_DAYS {
            log::warn!("{month} has only {count} daily returns");
            out.thin_months.push(month);
        }
        out.months.push(month);
        out.log_rv.push(sum_sq.sqrt().ln());
        prev = Some(month);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    #[test]
    fn single_return_month() {
        let daily = DailyReturns::new(vec![(d(2000, 1, 3), 0.05)]).unwrap();
        let rv = compute_monthly_log_rv(&daily).unwrap();
        assert!((rv.log_rv[0] - (-2.995_732_273_553_991)).abs() < 1e-12);
        assert_eq!(rv.thin_months.len(), 1);
    }

    #[test]
    fn pythagorean_month() {
        let daily = DailyReturns::new(vec![(d(2000, 1, 3), 0.03), (d(2000, 1, 4), -0.04)]).unwrap();
        let rv = compute_monthly_log_rv(&daily).unwrap();
        assert!((rv.log_rv[0] - 0.05f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn zero_rv_is_an_error() {
        let daily = DailyReturns::new(vec![(d(2000, 1, 3), 0.0)]).unwrap();
        assert!(matches!(compute_monthly_log_rv(&daily), Err(Error::Data(_))));
    }

    #[test]
    fn gaps_are_reported() {
        let daily = DailyReturns::new(vec![(d(2000, 1, 3), 0.01), (d(2000, 4, 3), 0.02)]).unwrap();
        let rv = compute_monthly_log_rv(&daily).unwrap();
        assert_eq!(rv.months.len(), 2);
        assert_eq!(rv.missing_months.len(), 2);
    }

    #[test]
    fn unordered_dates_rejected() {
        assert!(DailyReturns::new(vec![(d(2000, 1, 4), 0.01), (d(2000, 1, 3), 0.02)]).is_err());
        assert!(DailyReturns::new(vec![(d(2000, 1, 4), f64::NAN)]).is_err());
    }
}
