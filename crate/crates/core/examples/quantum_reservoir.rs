//! Measurement vectors from a lag window, for the single-time and two-time ensembles.

use qrc_vol::qrc::{extract_features, Ensemble, QuantumReservoirConfig};

fn main() -> qrc_vol::Result<()> {
    // Three lags of two already-scaled features, oldest first.
    let window = [vec![0.4, -1.1], vec![0.9, 0.2], vec![-0.3, 2.5]];
    let qr1 = QuantumReservoirConfig {
        n_input: 2,
        n_hidden: 3,
        ..Default::default()
    };
    let qr2 = QuantumReservoirConfig {
        ensemble: Ensemble::Qr2,
        ..qr1.clone()
    };
    let a = extract_features(&window, &qr1)?;
    let b = extract_features(&window, &qr2)?;
    println!("QR1 ({} values): {:.4?}", a.values.len(), a.values);
    println!("QR2 ({} values): {:.4?}", b.values.len(), b.values);
    let same = a.values.iter().zip(&b.values).all(|(x, y)| (x - y).abs() < 1e-12);
    println!("QR2 first half equals QR1: {same}");
    Ok(())
}
