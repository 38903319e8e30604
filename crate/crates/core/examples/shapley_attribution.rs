//! Shapley attribution of a quantum-reservoir forecast by time lag and by feature family.

use qrc_vol::dataset::{SyntheticMarket, SyntheticSpec};
use qrc_vol::explain::{shapley_values, Grouping, GroupingStrategy};
use qrc_vol::qrc::{QuantumForecaster, QuantumReservoirConfig};

fn main() -> qrc_vol::Result<()> {
    let frame = SyntheticMarket::generate(&SyntheticSpec::long_history(6))?.prepare()?.frame;
    let features: Vec<String> = ["RV", "MKT", "DEF"].iter().map(|s| s.to_string()).collect();
    let config = QuantumReservoirConfig {
        n_input: 3,
        n_hidden: 3,
        ..Default::default()
    };
    let k = config.lag_depth;
    let model = QuantumForecaster::new("QR", features.clone(), config)?;
    let train = 0..frame.len() - 1;
    let fitted = model.fit_quantum(&frame, train.clone())?;

    let flat = |t: usize| fitted.lag_grid(&frame, t).map(|g| g.concat());
    let explained = flat(frame.len() - 1)?;
    let background: Vec<Vec<f64>> = (train.end - 60..train.end).map(flat).collect::<qrc_vol::Result<_>>()?;
    let f = |x: &[f64]| fitted.predict_grid(&x.chunks(features.len()).collect::<Vec<_>>());

    for strategy in [GroupingStrategy::TimeLag, GroupingStrategy::FeatureFamily] {
        let grouping = Grouping::for_lag_grid(strategy, &features, k);
        let r = shapley_values(f, &explained, &background, &grouping, 200, 0)?;
        println!("{strategy:?} (exact: {}), prediction {:+.4}, baseline {:+.4}", r.exact, r.prediction, r.baseline);
        for (g, v) in r.groups.iter().zip(&r.values) {
            println!("  {g:<6} {v:+.5}");
        }
    }
    Ok(())
}
