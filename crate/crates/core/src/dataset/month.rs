use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Calendar month, stored as `year * 12 + (month - 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Month(i32);

impl Month {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::Data(format!("month {month} is not in 1..=12")));
        }
        Ok(Self(year * 12 + month as i32 - 1))
    }

    pub fn from_date(date: NaiveDate) -> Self {
        Self(date.year() * 12 + date.month0() as i32)
    }

    pub fn year(self) -> i32 {
        self.0.div_euclid(12)
    }

    /// 1-based month of the year.
    pub fn month(self) -> u32 {
        self.0.rem_euclid(12) as u32 + 1
    }

    pub fn succ(self) -> Self {
        Self(self.0 + 1)
    }

    pub fn offset(self, months: i32) -> Self {
        Self(self.0 + months)
    }

    /// Number of months from `self` to `later`.
    pub fn months_until(self, later: Month) -> i32 {
        later.0 - self.0
    }

    pub fn first_day(self) -> NaiveDate {
        NaiveDate::from_ymd_opt(self.year(), self.month(), 1).expect("valid first of month")
    }
}

impl fmt::Display for Month {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}-01", self.year(), self.month())
    }
}

impl FromStr for Month {
    type Err = Error;

    /// Accepts `YYYY-MM-01` (first of month) or `YYYY-MM`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Ok(date) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
            if date.day() != 1 {
                return Err(Error::Data(format!("monthly date {s} is not the first of the month")));
            }
            return Ok(Self::from_date(date));
        }
        let mut parts = s.splitn(2, '-');
        let year = parts.next().and_then(|y| y.parse::<i32>().ok());
        let month = parts.next().and_then(|m| m.parse::<u32>().ok());
        match (year, month) {
            (Some(y), Some(m)) => Month::new(y, m),
            _ => Err(Error::Data(format!("cannot parse month from {s:?}"))),
        }
    }
}

impl TryFrom<String> for Month {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Month> for String {
    fn from(m: Month) -> String {
        m.to_string()
    }
}
