//! Rolling one-step-ahead backtest of a quantum reservoir against two baselines.

use qrc_vol::backtest::{run_backtest, Forecaster, Protocol};
use qrc_vol::dataset::{RollingPlan, SyntheticMarket, SyntheticSpec};
use qrc_vol::econ::{LinearForecaster, LinearSpec};
use qrc_vol::qrc::{QuantumForecaster, QuantumReservoirConfig, QR1_FEATURES};

fn main() -> qrc_vol::Result<()> {
    let frame = SyntheticMarket::generate(&SyntheticSpec::long_history(4))?.prepare()?.frame;
    let plan = RollingPlan::new(frame.len(), 12, 3)?;
    println!("window width {}, first target {}", plan.window_width(), frame.months()[plan.first_target()]);

    let models: Vec<Box<dyn Forecaster>> = vec![
        Box::new(LinearForecaster::new("AR1", LinearSpec::ar(1))?),
        Box::new(LinearForecaster::new("HAR", LinearSpec::har())?),
        Box::new(QuantumForecaster::new(
            "QR1",
            QR1_FEATURES.iter().map(|s| s.to_string()).collect(),
            QuantumReservoirConfig::default(),
        )?),
    ];
    for m in &models {
        let run = run_backtest(m.as_ref(), &frame, &plan, Protocol::Rolling)?;
        let secs: f64 = run.window_seconds.iter().sum();
        println!("{:<4} MSE {:.4}  ({secs:.1}s)", run.model, run.mse()?);
    }
    Ok(())
}
