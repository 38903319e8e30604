//! Sensitivity of the quantum reservoir to the evolution time.

use qrc_vol::backtest::{run_backtest, Protocol};
use qrc_vol::dataset::{RollingPlan, SyntheticMarket, SyntheticSpec};
use qrc_vol::qrc::{QuantumForecaster, QuantumReservoirConfig, QR1_FEATURES};

fn main() -> qrc_vol::Result<()> {
    let frame = SyntheticMarket::generate(&SyntheticSpec::long_history(7))?.prepare()?.frame;
    let plan = RollingPlan::new(frame.len(), 12, 3)?;
    let features: Vec<String> = QR1_FEATURES.iter().map(|s| s.to_string()).collect();
    for tau in [0.5, 2.0, 5.0, 10.0, 20.0] {
        let config = QuantumReservoirConfig { tau, ..Default::default() };
        let model = QuantumForecaster::new("QR1", features.clone(), config)?;
        let run = run_backtest(&model, &frame, &plan, Protocol::Rolling)?;
        println!("tau {tau:>4}: MSE {:.4}", run.mse()?);
    }
    Ok(())
}
