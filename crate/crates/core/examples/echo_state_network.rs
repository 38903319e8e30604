//! Classical echo-state baselines on the RV series alone and with exogenous inputs.

use qrc_vol::backtest::{run_backtest, Protocol};
use qrc_vol::dataset::{RollingPlan, SyntheticMarket, SyntheticSpec};
use qrc_vol::esn::{spectral_radius, EsnForecaster};

fn main() -> qrc_vol::Result<()> {
    let frame = SyntheticMarket::generate(&SyntheticSpec::long_history(3))?.prepare()?.frame;
    let plan = RollingPlan::new(frame.len(), 24, 3)?;
    for model in [EsnForecaster::rc(0)?, EsnForecaster::rcx(0)?] {
        let rho = spectral_radius(model.network().recurrent());
        let run = run_backtest(&model, &frame, &plan, Protocol::Rolling)?;
        println!("{:<4} spectral radius {rho:.3}, MSE over {} windows {:.4}", run.model, run.forecast.len(), run.mse()?);
    }
    Ok(())
}
