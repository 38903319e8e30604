use serde::{Deserialize, Serialize};

use crate::dataset::Month;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum LossKind {
    /// Squared error of log-RV.
    Mse,
    /// `log f² + (a/f)²` on RV levels, `f = exp(forecast)`.
    Qlike,
}

impl LossKind {
    pub fn label(self) -> &'static str {
        match self {
            LossKind::Mse => "MSE",
            LossKind::Qlike => "QLIKE",
        }
    }
}

/// Header line stating the space each loss is computed in.
pub const LOSS_SPACE_NOTE: &str =
    "# loss space: MSE on log-RV; QLIKE on RV levels (exponentiated log forecasts)";

/// Per-date loss contributions of one model.
#[derive(Clone, Debug, PartialEq)]
pub struct LossSeries {
    pub model: String,
    pub kind: LossKind,
    pub dates: Vec<Month>,
    pub losses: Vec<f64>,
}

fn check_pair(actual: &[f64], forecast: &[f64]) -> Result<()> {
    if actual.len() != forecast.len() || actual.is_empty() {
        return Err(Error::Argument(format!(
            "loss needs equal non-empty series, got {} and {}",
            actual.len(),
            forecast.len()
        )));
    }
    Ok(())
}

/// Mean squared error.
pub fn mse(actual: &[f64], forecast: &[f64]) -> Result<f64> {
    check_pair(actual, forecast)?;
    Ok(actual.iter().zip(forecast).map(|(a, f)| (a - f).powi(2)).sum::<f64>() / actual.len() as f64)
}

fn qlike_term(a: f64, f: f64) -> Result<f64> {
    if !(f > 0.0 && f.is_finite()) {
        return Err(Error::Loss(format!("QLIKE needs a positive forecast level, got {f}")));
    }
    Ok((f * f).ln() + (a / f).powi(2))
}

/// Mean QLIKE on volatility levels.
pub fn qlike(actual: &[f64], forecast: &[f64]) -> Result<f64> {
    check_pair(actual, forecast)?;
    let mut total = 0.0;
    for (&a, &f) in actual.iter().zip(forecast) {
        total += qlike_term(a, f)?;
    }
    Ok(total / actual.len() as f64)
}

impl LossSeries {
    /// Loss contributions from log-RV actuals and forecasts.
    pub fn from_forecasts(
        model: &str,
        kind: LossKind,
        dates: &[Month],
        actual_log: &[f64],
        forecast_log: &[f64],
    ) -> Result<Self> {
        check_pair(actual_log, forecast_log)?;
        if dates.len() != actual_log.len() {
            return Err(Error::Argument("dates and losses differ in length".into()));
        }
        let losses = actual_log
            .iter()
            .zip(forecast_log)
            .map(|(&a, &f)| match kind {
                LossKind::Mse => Ok((a - f).powi(2)),
                LossKind::Qlike => qlike_term(a.exp(), f.exp()),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(model, kind, dates.to_vec(), losses)
    }

    pub fn new(model: &str, kind: LossKind, dates: Vec<Month>, losses: Vec<f64>) -> Result<Self> {
        if dates.len() != losses.len() {
            return Err(Error::Argument("dates and losses differ in length".into()));
        }
        if let Some(i) = losses.iter().position(|l| !l.is_finite()) {
            return Err(Error::Loss(format!("{model}: non-finite loss at position {i}")));
        }
        Ok(Self {
            model: model.to_string(),
            kind,
            dates,
            losses,
        })
    }

    pub fn mean(&self) -> f64 {
        self.losses.iter().sum::<f64>() / self.losses.len() as f64
    }
}

/// All series must share one date index and loss kind.
pub(crate) fn check_aligned(series: &[&LossSeries]) -> Result<()> {
    let first = series
        .first()
        .ok_or_else(|| Error::Argument("no loss series".into()))?;
    for s in series {
        if s.dates != first.dates {
            return Err(Error::Argument(format!(
                "loss series of {} and {} are not on the same dates",
                first.model, s.model
            )));
        }
        if s.kind != first.kind {
            return Err(Error::Argument("loss series mix MSE and QLIKE".into()));
        }
    }
    Ok(())
}
