//! Data ingestion, realized volatility, feature frames, angle scaling and
//! rolling-window plans.

mod csvio;
mod frame;
mod month;
mod returns;
mod rolling;
mod scaler;
mod synthetic;

pub use csvio::fmt_f64;
pub use frame::{
    assemble_frame, derive_rv_aggregates, expanding_rv_aggregates, load_features, load_frame,
    ExogenousFrame, FeatureFrame, PreparedFrame, RvAggregates, EXOGENOUS, FRAME_COLUMNS, RV,
    RV_ANNUAL, RV_QUARTERLY,
};
pub use month::Month;
pub use returns::{compute_monthly_log_rv, load_daily, DailyReturns, MonthlyLogRv, THIN_MONTH_DAYS};
pub use rolling::{RollingPlan, RollingWindow, DEFAULT_OUT_OF_SAMPLE};
pub use scaler::AngleScaler;
pub use synthetic::{SyntheticMarket, SyntheticSpec};
