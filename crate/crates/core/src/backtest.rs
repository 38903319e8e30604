//! One-step-ahead rolling backtests.

use std::io::Write;
use std::ops::Range;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{fmt_f64, FeatureFrame, Month, RollingPlan};
use crate::error::{Error, Result};
use crate::evaluation::{LossKind, LossSeries};

/// A model that can be re-estimated on any training span.
pub trait Forecaster: Send + Sync {
    fn name(&self) -> &str;

    /// Whether separate windows may be fitted concurrently.
    fn parallel_windows(&self) -> bool {
        true
    }

    /// Estimates the model on frame rows `train`.
    fn fit(&self, frame: &FeatureFrame, train: Range<usize>) -> Result<Box<dyn FittedForecaster>>;
}

pub trait FittedForecaster: Send + Sync {
    /// Log-RV forecast for row `target`, using only rows before it.
    fn forecast(&self, frame: &FeatureFrame, target: usize) -> Result<f64>;
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    /// Re-estimate on every window.
    #[default]
    Rolling,
    /// Estimate once on the first window and forecast every target with it.
    SingleSplit,
}

/// Out-of-sample forecasts of one model.
#[derive(Clone, Debug, PartialEq)]
pub struct ForecastRun {
    pub model: String,
    pub target_months: Vec<Month>,
    pub actual: Vec<f64>,
    pub forecast: Vec<f64>,
    /// Fit plus forecast time per window, in seconds.
    pub window_seconds: Vec<f64>,
}

impl ForecastRun {
    pub fn losses(&self, kind: LossKind) -> Result<LossSeries> {
        LossSeries::from_forecasts(&self.model, kind, &self.target_months, &self.actual, &self.forecast)
    }

    pub fn mse(&self) -> Result<f64> {
        crate::evaluation::mse(&self.actual, &self.forecast)
    }

    /// `date,actual,forecast` with log-RV values.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::from("date,actual_log_rv,forecast_log_rv\n");
        for ((m, a), f) in self.target_months.iter().zip(&self.actual).zip(&self.forecast) {
            out.push_str(&format!("{m},{},{}\n", fmt_f64(*a), fmt_f64(*f)));
        }
        let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
    }
}

pub fn run_backtest(
    model: &dyn Forecaster,
    frame: &FeatureFrame,
    plan: &RollingPlan,
    protocol: Protocol,
) -> Result<ForecastRun> {
    plan.validate()?;
    if plan.total_length != frame.len() {
        return Err(Error::Plan(format!(
            "plan covers {} rows but the frame has {}",
            plan.total_length,
            frame.len()
        )));
    }
    let windows = plan.windows();
    let timed = |f: &dyn Fn() -> Result<f64>| -> Result<(f64, f64)> {
        let start = Instant::now();
        let y = f()?;
        if !y.is_finite() {
            return Err(Error::Data(format!("{} produced a non-finite forecast", model.name())));
        }
        Ok((y, start.elapsed().as_secs_f64()))
    };
    let results: Vec<(f64, f64)> = match protocol {
        Protocol::Rolling => {
            let one = |w: &crate::dataset::RollingWindow| {
                timed(&|| model.fit(frame, w.train.clone())?.forecast(frame, w.target))
            };
            if model.parallel_windows() {
                windows.par_iter().map(one).collect::<Result<_>>()?
            } else {
                windows.iter().map(one).collect::<Result<_>>()?
            }
        }
        Protocol::SingleSplit => {
            let fitted = model.fit(frame, windows[0].train.clone())?;
            windows
                .par_iter()
                .map(|w| timed(&|| fitted.forecast(frame, w.target)))
                .collect::<Result<_>>()?
        }
    };
    let targets: Vec<usize> = windows.iter().map(|w| w.target).collect();
    Ok(ForecastRun {
        model: model.name().to_string(),
        target_months: targets.iter().map(|&t| frame.months()[t]).collect(),
        actual: targets.iter().map(|&t| frame.log_rv()[t]).collect(),
        forecast: results.iter().map(|r| r.0).collect(),
        window_seconds: results.iter().map(|r| r.1).collect(),
    })
}
