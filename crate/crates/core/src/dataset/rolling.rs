//! Fixed-width rolling windows for one-step-ahead backtests.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_OUT_OF_SAMPLE: usize = 245;

/// History beyond the lag depth that the longest-memory model (HAR) needs.
const MIN_EXTRA_HISTORY: usize = 13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RollingPlan {
    pub total_length: usize,
    pub n_out_of_sample: usize,
    pub lag_depth: usize,
}

/// Window `index` trains on rows `train` and forecasts row `target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RollingWindow {
    pub index: usize,
    pub train: Range<usize>,
    pub target: usize,
}

impl RollingPlan {
    pub fn new(total_length: usize, n_out_of_sample: usize, lag_depth: usize) -> Result<Self> {
        let plan = Self {
            total_length,
            n_out_of_sample,
            lag_depth,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_out_of_sample == 0 {
            return Err(Error::Plan("at least one out-of-sample month is required".into()));
        }
        let needed = self.n_out_of_sample + self.lag_depth + MIN_EXTRA_HISTORY;
        if self.total_length <= needed {
            return Err(Error::Plan(format!(
                "{} rows cannot support {} out-of-sample months with lag depth {}; need more than {needed}",
                self.total_length, self.n_out_of_sample, self.lag_depth
            )));
        }
        Ok(())
    }

    /// Training width `W = total_length - n_out_of_sample`.
    pub fn window_width(&self) -> usize {
        self.total_length - self.n_out_of_sample
    }

    /// First out-of-sample row.
    pub fn first_target(&self) -> usize {
        self.window_width()
    }

    pub fn windows(&self) -> Vec<RollingWindow> {
        let w = self.window_width();
        (0..self.n_out_of_sample)
            .map(|i| RollingWindow {
                index: i,
                train: i..i + w,
                target: i + w,
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_period_layout() {
        let plan = RollingPlan::new(815, DEFAULT_OUT_OF_SAMPLE, 3).unwrap();
        assert_eq!(plan.window_width(), 570);
        let ws = plan.windows();
        assert_eq!(ws.len(), 245);
        assert_eq!(ws[0].train, 0..570);
        assert_eq!(ws[0].target, 570);
        assert!(ws.windows(2).all(|p| p[1].target == p[0].target + 1 && p[1].train.start == p[0].train.start + 1));
        assert_eq!(ws.last().unwrap().target, 814);
    }

    #[test]
    fn precondition_enforced() {
        assert!(matches!(RollingPlan::new(261, 245, 3), Err(Error::Plan(_))));
        assert!(RollingPlan::new(262, 245, 3).is_ok());
        assert!(RollingPlan::new(100, 0, 3).is_err());
    }
}
