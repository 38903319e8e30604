//! Forecast losses, Diebold–Mariano tests and the Model Confidence Set.

mod dm;
mod loss;
mod mcs;
mod report;

pub use dm::{default_nw_lag, dm_test, dm_test_raw, newey_west_variance, normal_two_sided_p, DmResult};
pub use loss::{mse, qlike, LossKind, LossSeries, LOSS_SPACE_NOTE};
pub use mcs::{mcs, BootstrapConfig, McsResult};
pub(crate) use report::write_text;
pub use report::{DmMatrix, EvaluationConfig, EvaluationReport};
