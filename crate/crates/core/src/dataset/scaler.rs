//! Min/max scaling of features onto rotation angles in `[-π, π]`.

use std::f64::consts::PI;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-feature `(min, max)` learned from a training span.
///
/// A feature that is constant over the span maps to angle 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleScaler {
    bounds: Vec<(f64, f64)>,
}

impl AngleScaler {
    /// Fits on rows `span` of each column. Nothing outside `span` is read.
    pub fn fit(columns: &[&[f64]], span: Range<usize>) -> Result<Self> {
        if span.is_empty() {
            return Err(Error::Argument("scaler span is empty".into()));
        }
        let mut bounds = Vec::with_capacity(columns.len());
        for (j, col) in columns.iter().enumerate() {
            let rows = col.get(span.clone()).ok_or_else(|| {
                Error::Argument(format!("scaler span {span:?} exceeds column {j} of length {}", col.len()))
            })?;
            let lo = rows.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = rows.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(Error::Data(format!("column {j} has non-finite values in the scaler span")));
            }
            bounds.push((lo, hi));
        }
        Ok(Self { bounds })
    }

    pub fn from_bounds(bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.iter().any(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo <= hi)) {
            return Err(Error::Argument("scaler bounds must be finite with min <= max".into()));
        }
        Ok(Self { bounds })
    }

    pub fn n_features(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    /// Angle for `value` of feature `j`, clamped to `[-π, π]`.
    pub fn transform(&self, j: usize, value: f64) -> f64 {
        let (lo, hi) = self.bounds[j];
        if hi <= lo {
            return 0.0;
        }
        let angle = -PI + 2.0 * PI * (value - lo) / (hi - lo);
        angle.clamp(-PI, PI)
    }

    pub fn inverse(&self, j: usize, angle: f64) -> f64 {
        let (lo, hi) = self.bounds[j];
        if hi <= lo {
            return lo;
        }
        lo + (angle + PI) / (2.0 * PI) * (hi - lo)
    }

    /// Scales one observation (one value per feature).
    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter().enumerate().map(|(j, &x)| self.transform(j, x)).collect()
    }

    /// Angle matrix `[row][feature]` for rows `range` of `columns`.
    pub fn transform_columns(&self, columns: &[&[f64]], range: Range<usize>) -> Vec<Vec<f64>> {
        range
            .map(|t| columns.iter().enumerate().map(|(j, c)| self.transform(j, c[t])).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_midpoint_and_clamp() {
        let col = [2.0, 4.0, 6.0, 100.0];
        let s = AngleScaler::fit(&[&col], 0..3).unwrap();
        assert_eq!(s.transform(0, 2.0), -PI);
        assert_eq!(s.transform(0, 6.0), PI);
        assert!(s.transform(0, 4.0).abs() < 1e-15);
        assert_eq!(s.transform(0, 100.0), PI);
        assert_eq!(s.transform(0, -7.0), -PI);
    }

    #[test]
    fn constant_feature_maps_to_zero() {
        let col = [1.5; 5];
        let s = AngleScaler::fit(&[&col], 0..5).unwrap();
        assert_eq!(s.transform(0, 1.5), 0.0);
        assert_eq!(s.transform(0, 9.0), 0.0);
    }

    #[test]
    fn ignores_rows_outside_span() {
        let mut col = vec![0.0, 1.0, 2.0, 3.0];
        let a = AngleScaler::fit(&[&col], 0..3).unwrap();
        col[3] = 1e9;
        let b = AngleScaler::fit(&[&col], 0..3).unwrap();
        assert_eq!(a, b);
        assert!(AngleScaler::fit(&[&col], 2..2).is_err());
        assert!(AngleScaler::fit(&[&col], 0..9).is_err());
    }
}
