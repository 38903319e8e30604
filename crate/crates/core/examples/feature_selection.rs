//! Greedy forward selection over the frame columns with a cheap HARX wrapper.

use qrc_vol::backtest::{Forecaster, Protocol};
use qrc_vol::dataset::{RollingPlan, SyntheticMarket, SyntheticSpec, EXOGENOUS};
use qrc_vol::econ::{LinearForecaster, LinearSpec};
use qrc_vol::explain::{forward_select, FeaturePool};

fn main() -> qrc_vol::Result<()> {
    let frame = SyntheticMarket::generate(&SyntheticSpec::long_history(5))?.prepare()?.frame;
    let plan = RollingPlan::new(frame.len(), 60, 3)?;
    let pool = FeaturePool::new(EXOGENOUS.iter().map(|s| s.to_string()).collect())?;
    let factory = |subset: &[String]| -> qrc_vol::Result<Box<dyn Forecaster>> {
        let spec = LinearSpec { exogenous: subset.to_vec(), ..LinearSpec::harx() };
        Ok(Box::new(LinearForecaster::new("HARX", spec)?))
    };
    let trace = forward_select(&pool, factory, &frame, &plan, Protocol::Rolling, 5)?;
    for (i, (f, m)) in trace.selected.iter().zip(&trace.mse).enumerate() {
        println!("step {}: +{f:<4} MSE {m:.5}", i + 1);
    }
    println!("stopped: {:?}", trace.stop_reason);
    Ok(())
}
