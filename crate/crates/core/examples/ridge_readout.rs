//! Fit the linear readout on reservoir features and forecast a held-out point.

use qrc_vol::qrc::{extract_features, fit_readout, predict, QuantumReservoirConfig};
use qrc_vol::ridge::DEFAULT_RIDGE_DELTA;

fn main() -> qrc_vol::Result<()> {
    let config = QuantumReservoirConfig {
        n_input: 1,
        n_hidden: 3,
        ..Default::default()
    };
    // Target: the input two steps back, angles in [0, pi].
    let u: Vec<f64> = (0..300).map(|t| std::f64::consts::PI * (0.5 + 0.5 * ((t as f64) * 0.77).sin())).collect();
    let mut feats = Vec::new();
    let mut targets = Vec::new();
    for t in 2..u.len() {
        let w: Vec<Vec<f64>> = (t - 2..=t).map(|s| vec![u[s]]).collect();
        feats.push(extract_features(&w, &config)?);
        targets.push(u[t - 2]);
    }
    let split = 250;
    let weights = fit_readout(&feats[..split], &targets[..split], DEFAULT_RIDGE_DELTA)?;
    let err: f64 = feats[split..]
        .iter()
        .zip(&targets[split..])
        .map(|(f, y)| Ok((predict(f, &weights)? - y).powi(2)))
        .sum::<qrc_vol::Result<f64>>()?
        / (feats.len() - split) as f64;
    println!("readout: {} weights, intercept {:+.4}", weights.weights.len(), weights.intercept);
    println!("held-out MSE recalling u(t-2): {err:.3e}");
    Ok(())
}
