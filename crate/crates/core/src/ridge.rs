//! Closed-form ridge regression shared by every reservoir readout.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Default ridge penalty on the readout Gram matrix.
pub const DEFAULT_RIDGE_DELTA: f64 = 1e-8;

/// Linear readout `ŷ = w·m + intercept`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReadoutWeights {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl ReadoutWeights {
    pub fn predict(&self, features: &[f64]) -> Result<f64> {
        if features.len() != self.weights.len() {
            return Err(Error::Argument(format!(
                "readout expects {} features, got {}",
                self.weights.len(),
                features.len()
            )));
        }
        let y = self.intercept + self.weights.iter().zip(features).map(|(w, x)| w * x).sum::<f64>();
        Ok(y)
    }
}

/// Solves `(MᵀM + δI) w = Mᵀy` where `M` is `rows` with a trailing constant
/// column; the penalty applies to every coefficient including the intercept.
pub fn ridge_fit<R: AsRef<[f64]>>(rows: &[R], targets: &[f64], delta: f64) -> Result<ReadoutWeights> {
    if rows.len() != targets.len() {
        return Err(Error::Argument(format!(
            "{} feature rows but {} targets",
            rows.len(),
            targets.len()
        )));
    }
    if rows.len() < 2 {
        return Err(Error::Argument("ridge readout needs at least two samples".into()));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Argument(format!("ridge penalty must be positive, got {delta}")));
    }
    let p = rows[0].as_ref().len();
    let q = p + 1;
    let mut gram = DMatrix::<f64>::zeros(q, q);
    let mut rhs = DVector::<f64>::zeros(q);
    let mut x = vec![0.0; q];
    for (t, (row, &y)) in rows.iter().zip(targets).enumerate() {
        let row = row.as_ref();
        if row.len() != p {
            return Err(Error::Argument(format!("row {t} has {} features, expected {p}", row.len())));
        }
        if !y.is_finite() || row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data(format!("non-finite value in ridge sample {t}")));
        }
        x[..p].copy_from_slice(row);
        x[p] = 1.0;
        for a in 0..q {
            rhs[a] += x[a] * y;
            for b in a..q {
                gram[(a, b)] += x[a] * x[b];
            }
        }
    }
    for a in 0..q {
        gram[(a, a)] += delta;
        for b in 0..a {
            gram[(a, b)] = gram[(b, a)];
        }
    }
    let solution = match gram.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        None => gram
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Data("ridge normal equations are singular".into()))?,
    };
    Ok(ReadoutWeights {
        weights: solution.iter().take(p).copied().collect(),
        intercept: solution[p],
    })
}
