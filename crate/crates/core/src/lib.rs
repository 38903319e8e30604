//! Realized-volatility forecasting with quantum and classical reservoirs.

pub mod backtest;
pub mod dataset;
pub mod econ;
pub mod error;
pub mod esn;
pub mod evaluation;
pub mod explain;
pub mod pipeline;
pub mod qrc;
pub mod quantum;
pub mod ridge;

pub use error::{Error, Result};
