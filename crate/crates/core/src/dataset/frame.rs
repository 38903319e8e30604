//! Monthly feature frames: loading, validation, assembly and serialization.

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use super::csvio::{fmt_f64, HeaderIndex, Offenders};
use super::month::Month;
use super::returns::MonthlyLogRv;
use crate::error::{Error, Result};

pub const RV: &str = "RV";
pub const RV_QUARTERLY: &str = "RVq";
pub const RV_ANNUAL: &str = "RVa";

/// Macro-financial columns ingested from the feature CSV.
pub const EXOGENOUS: [&str; 10] = ["DP", "EP", "MKT", "HML", "SMB", "STR", "TB", "INF", "DEF", "IP"];

/// Column order of a prepared frame.
pub const FRAME_COLUMNS: [&str; 13] = [
    RV, RV_QUARTERLY, RV_ANNUAL, "DP", "EP", "MKT", "HML", "SMB", "STR", "TB", "INF", "DEF", "IP",
];

fn check_contiguous(months: &[Month], what: &str) -> Result<()> {
    let mut seen = HashSet::new();
    let dups: Vec<String> = months
        .iter()
        .filter(|m| !seen.insert(**m))
        .map(|m| m.to_string())
        .collect();
    if !dups.is_empty() {
        return Err(Error::Data(format!("{what}: duplicated month(s) {}", dups.join(", "))));
    }
    let mut gaps = Offenders::default();
    for w in months.windows(2) {
        let mut m = w[0].succ();
        while m < w[1] {
            gaps.push(format!("missing {m}"));
            m = m.succ();
        }
    }
    gaps.into_result(&format!("{what}: date gaps"))
}

fn check_columns(months: &[Month], names: &[&str], columns: &[Vec<f64>], what: &str) -> Result<()> {
    if columns.len() != names.len() {
        return Err(Error::Data(format!(
            "{what}: {} columns supplied, expected {}",
            columns.len(),
            names.len()
        )));
    }
    let mut bad = Offenders::default();
    for (name, col) in names.iter().zip(columns) {
        if col.len() != months.len() {
            bad.push(format!("column {name} has {} rows, expected {}", col.len(), months.len()));
            continue;
        }
        for (m, v) in months.iter().zip(col) {
            if !v.is_finite() {
                bad.push(format!("{name} is {v} in {m}"));
            }
        }
    }
    bad.into_result(what)
}

/// Reads a monthly CSV keyed by header names. Rows may come in any order.
fn read_monthly_csv(path: &Path, names: &[&str]) -> Result<(Vec<Month>, Vec<Vec<f64>>)> {
    let what = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Data(format!("{what}: {e}")))?;
    let header = HeaderIndex::new(reader.headers()?, path)?;
    let date_col = header.require(&["date"])?[0];
    let cols = header.require(names)?;
    let mut rows: Vec<(Month, Vec<f64>)> = Vec::new();
    let mut bad = Offenders::default();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = match rec {
            Ok(r) => r,
            Err(e) => {
                bad.push(format!("line {line}: {e}"));
                continue;
            }
        };
        let month = match rec.get(date_col).unwrap_or("").parse::<Month>() {
            Ok(m) => m,
            Err(e) => {
                bad.push(format!("line {line}: {e}"));
                continue;
            }
        };
        let mut values = Vec::with_capacity(cols.len());
        for (&c, name) in cols.iter().zip(names) {
            match rec.get(c).unwrap_or("").parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => bad.push(format!("line {line}: {name} = {:?} is not a finite number", rec.get(c))),
            }
        }
        if values.len() == cols.len() {
            rows.push((month, values));
        }
    }
    bad.into_result(&what)?;
    if rows.is_empty() {
        return Err(Error::Data(format!("{what}: no data rows")));
    }
    rows.sort_by_key(|(m, _)| *m);
    let months: Vec<Month> = rows.iter().map(|(m, _)| *m).collect();
    check_contiguous(&months, &what)?;
    let columns = (0..names.len())
        .map(|j| rows.iter().map(|(_, v)| v[j]).collect())
        .collect();
    Ok((months, columns))
}

fn write_monthly_csv(path: &Path, months: &[Month], names: &[&str], columns: &[Vec<f64>]) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path).map_err(|e| Error::io(path, e))?);
    let mut out = String::from("date");
    for n in names {
        out.push(',');
        out.push_str(n);
    }
    out.push('\n');
    for (i, m) in months.iter().enumerate() {
        out.push_str(&m.to_string());
        for col in columns {
            out.push(',');
            out.push_str(&fmt_f64(col[i]));
        }
        out.push('\n');
    }
    file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))?;
    file.flush().map_err(|e| Error::io(path, e))
}

/// The macro-financial input table (`date,DP,EP,...,IP`).
#[derive(Clone, Debug, PartialEq)]
pub struct ExogenousFrame {
    months: Vec<Month>,
    columns: Vec<Vec<f64>>,
}

impl ExogenousFrame {
    /// `columns` follow the order of [`EXOGENOUS`].
    pub fn new(months: Vec<Month>, columns: Vec<Vec<f64>>) -> Result<Self> {
        check_contiguous(&months, "exogenous features")?;
        check_columns(&months, &EXOGENOUS, &columns, "exogenous features")?;
        Ok(Self { months, columns })
    }

    pub fn months(&self) -> &[Month] {
        &self.months
    }

    pub fn column(&self, name: &str) -> Result<&[f64]> {
        EXOGENOUS
            .iter()
            .position(|n| *n == name)
            .map(|i| self.columns[i].as_slice())
            .ok_or_else(|| Error::Argument(format!("unknown exogenous column {name}")))
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_monthly_csv(path.as_ref(), &self.months, &EXOGENOUS, &self.columns)
    }
}

pub fn load_features(path: impl AsRef<Path>) -> Result<ExogenousFrame> {
    let (months, columns) = read_monthly_csv(path.as_ref(), &EXOGENOUS)?;
    ExogenousFrame::new(months, columns)
}

/// Aligned monthly frame: log-RV, its quarterly and annual averages, and the
/// exogenous columns.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureFrame {
    months: Vec<Month>,
    columns: Vec<Vec<f64>>,
}

impl FeatureFrame {
    /// `columns` follow the order of [`FRAME_COLUMNS`].
    pub fn new(months: Vec<Month>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if months.is_empty() {
            return Err(Error::Data("feature frame is empty".into()));
        }
        check_contiguous(&months, "feature frame")?;
        check_columns(&months, &FRAME_COLUMNS, &columns, "feature frame")?;
        Ok(Self { months, columns })
    }

    pub fn len(&self) -> usize {
        self.months.len()
    }

    pub fn is_empty(&self) -> bool {
        self.months.is_empty()
    }

    pub fn months(&self) -> &[Month] {
        &self.months
    }

    pub fn column_index(name: &str) -> Result<usize> {
        FRAME_COLUMNS
            .iter()
            .position(|n| *n == name)
            .ok_or_else(|| Error::Config(format!("unknown feature {name:?}")))
    }

    pub fn column(&self, name: &str) -> Result<&[f64]> {
        Ok(&self.columns[Self::column_index(name)?])
    }

    /// Log realized volatility, the forecasting target.
    pub fn log_rv(&self) -> &[f64] {
        &self.columns[0]
    }

    pub fn columns(&self, names: &[String]) -> Result<Vec<&[f64]>> {
        names.iter().map(|n| self.column(n)).collect()
    }

    /// Rows `range` as a new frame.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Result<Self> {
        if range.end > self.len() || range.is_empty() {
            return Err(Error::Argument(format!("bad frame slice {range:?} of {}", self.len())));
        }
        Ok(Self {
            months: self.months[range.clone()].to_vec(),
            columns: self.columns.iter().map(|c| c[range.clone()].to_vec()).collect(),
        })
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_monthly_csv(path.as_ref(), &self.months, &FRAME_COLUMNS, &self.columns)
    }
}

/// Reads a prepared frame file (`date` plus every [`FRAME_COLUMNS`] entry).
pub fn load_frame(path: impl AsRef<Path>) -> Result<FeatureFrame> {
    let (months, columns) = read_monthly_csv(path.as_ref(), &FRAME_COLUMNS)?;
    FeatureFrame::new(months, columns)
}

/// Trailing 3- and 12-month means of log-RV, emitted only where 12 months of
/// history (inclusive of the current month) exist.
#[derive(Clone, Debug, PartialEq)]
pub struct RvAggregates {
    /// Index into the input series of the first emitted value.
    pub first_index: usize,
    pub quarterly: Vec<f64>,
    pub annual: Vec<f64>,
}

pub fn derive_rv_aggregates(log_rv: &[f64]) -> RvAggregates {
    let first_index = 11;
    let (q, a): (Vec<f64>, Vec<f64>) = (first_index..log_rv.len())
        .map(|t| (trailing_mean(log_rv, t, 3), trailing_mean(log_rv, t, 12)))
        .unzip();
    RvAggregates {
        first_index,
        quarterly: q,
        annual: a,
    }
}

/// Like [`derive_rv_aggregates`] but full length: months with less history
/// average over what is available.
pub fn expanding_rv_aggregates(log_rv: &[f64]) -> (Vec<f64>, Vec<f64>) {
    (0..log_rv.len())
        .map(|t| (trailing_mean(log_rv, t, 3), trailing_mean(log_rv, t, 12)))
        .unzip()
}

fn trailing_mean(x: &[f64], t: usize, span: usize) -> f64 {
    let start = (t + 1).saturating_sub(span);
    let w = &x[start..=t];
    w.iter().sum::<f64>() / w.len() as f64
}

/// A prepared frame together with the warnings raised while building it.
#[derive(Clone, Debug)]
pub struct PreparedFrame {
    pub frame: FeatureFrame,
    pub warnings: Vec<String>,
}

/// Joins monthly log-RV with the exogenous table over their common months.
pub fn assemble_frame(rv: &MonthlyLogRv, exo: &ExogenousFrame) -> Result<PreparedFrame> {
    let mut warnings = Vec::new();
    let (rvq, rva) = expanding_rv_aggregates(&rv.log_rv);
    let short = rv.months.len().min(11);
    if short > 0 {
        warnings.push(format!(
            "RVq/RVa for the first {short} month(s) average fewer than 12 months of history"
        ));
    }
    for m in &rv.thin_months {
        warnings.push(format!("{m} has fewer than {} daily returns", super::returns::THIN_MONTH_DAYS));
    }
    let start = rv.months[0].max(exo.months()[0]);
    let end = (*rv.months.last().unwrap()).min(*exo.months().last().unwrap());
    if start > end {
        return Err(Error::Data(format!(
            "returns ({}..{}) and features ({}..{}) do not overlap",
            rv.months[0],
            rv.months.last().unwrap(),
            exo.months()[0],
            exo.months().last().unwrap()
        )));
    }
    let missing: Vec<String> = rv
        .missing_months
        .iter()
        .filter(|m| **m >= start && **m <= end)
        .map(|m| m.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::Data(format!(
            "no daily returns for month(s) {} inside the frame span",
            missing.join(", ")
        )));
    }
    let rv_pos = |m: Month| rv.months.iter().position(|x| *x == m).expect("contiguous rv months");
    let (i0, i1) = (rv_pos(start), rv_pos(end));
    let e0 = exo.months()[0].months_until(start) as usize;
    let n = i1 - i0 + 1;
    let mut columns = vec![
        rv.log_rv[i0..=i1].to_vec(),
        rvq[i0..=i1].to_vec(),
        rva[i0..=i1].to_vec(),
    ];
    for name in EXOGENOUS {
        columns.push(exo.column(name)?[e0..e0 + n].to_vec());
    }
    let frame = FeatureFrame::new(rv.months[i0..=i1].to_vec(), columns)?;
    if frame.len() < 13 {
        warnings.push(format!(
            "frame has {} row(s); HAR-type models need at least 13",
            frame.len()
        ));
    }
    Ok(PreparedFrame { frame, warnings })
}
