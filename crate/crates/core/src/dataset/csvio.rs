//! Small helpers shared by the CSV readers and writers.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};

/// Maximum number of offending rows quoted in a data error.
const MAX_LISTED: usize = 20;

pub(crate) struct HeaderIndex {
    index: HashMap<String, usize>,
    source: String,
}

impl HeaderIndex {
    pub(crate) fn new(headers: &csv::StringRecord, source: &Path) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, h) in headers.iter().enumerate() {
            if index.insert(h.trim().to_string(), i).is_some() {
                return Err(Error::Data(format!(
                    "{}: duplicated column {h:?}",
                    source.display()
                )));
            }
        }
        Ok(Self {
            index,
            source: source.display().to_string(),
        })
    }

    /// Column positions for `names`, or a data error naming every missing column.
    pub(crate) fn require(&self, names: &[&str]) -> Result<Vec<usize>> {
        let missing: Vec<&str> = names
            .iter()
            .copied()
            .filter(|n| !self.index.contains_key(*n))
            .collect();
        if !missing.is_empty() {
            return Err(Error::Data(format!(
                "{}: missing required column(s) {}",
                self.source,
                missing.join(", ")
            )));
        }
        Ok(names.iter().map(|n| self.index[*n]).collect())
    }
}

#[derive(Default)]
pub(crate) struct Offenders(Vec<String>);

impl Offenders {
    pub(crate) fn push(&mut self, msg: String) {
        self.0.push(msg);
    }

    pub(crate) fn into_result(self, what: &str) -> Result<()> {
        if self.0.is_empty() {
            return Ok(());
        }
        let total = self.0.len();
        let mut listed: Vec<String> = self.0.into_iter().take(MAX_LISTED).collect();
        if total > MAX_LISTED {
            listed.push(format!("... and {} more", total - MAX_LISTED));
        }
        Err(Error::Data(format!("{what}: {}", listed.join("; "))))
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for &x in &[0.1, -3.025123456789012, 1e-300, 6.02214076e23, 0.0] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
    }
}
