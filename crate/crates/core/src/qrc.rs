//! Quantum reservoir forecasting models (QR1 and QR2).
//!
//! A lag window of `k` angle vectors is fed through an Ising reservoir one lag
//! at a time: the input register is loaded by Y rotations, the full register
//! evolves for `τ`, and the input qubits are traced out so only the hidden
//! qubits carry information to the next lag. After the newest lag the whole
//! register is measured in the Z basis. QR2 also measures a branch whose final
//! evolution runs for `τ/2` and appends those expectations.

use std::collections::HashMap;
use std::ops::Range;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::backtest::{FittedForecaster, Forecaster};
use crate::dataset::{AngleScaler, FeatureFrame, Month};
use crate::error::{Error, Result};
use crate::quantum::{
    build_ising_hamiltonian, check_angles, product_amplitudes, FactoredState, IsingSpec,
    RealEigenBasis, MAX_QUBITS,
};
use crate::ridge::{ridge_fit, ReadoutWeights, DEFAULT_RIDGE_DELTA};

pub const DEFAULT_TAU: f64 = 10.0;
pub const DEFAULT_TOTAL_QUBITS: usize = 10;
pub const DEFAULT_LAG_DEPTH: usize = 3;

/// Feature set of the single-time reservoir.
pub const QR1_FEATURES: [&str; 7] = ["RV", "MKT", "DP", "IP", "RVq", "STR", "DEF"];
/// Feature set of the two-time ensemble.
pub const QR2_FEATURES: [&str; 7] = ["RV", "MKT", "STR", "RVq", "EP", "INF", "DEF"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ensemble {
    /// Measure after evolving for `τ`.
    Qr1,
    /// Measure after `τ` and, on a branch of the same state, after `τ/2`.
    Qr2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumReservoirConfig {
    pub n_input: usize,
    pub n_hidden: usize,
    pub lag_depth: usize,
    pub tau: f64,
    pub field_strength: f64,
    pub coupling_seed: u64,
    pub ensemble: Ensemble,
    pub ridge_delta: f64,
}

impl Default for QuantumReservoirConfig {
    fn default() -> Self {
        Self {
            n_input: 7,
            n_hidden: 3,
            lag_depth: DEFAULT_LAG_DEPTH,
            tau: DEFAULT_TAU,
            field_strength: 1.0,
            coupling_seed: 0,
            ensemble: Ensemble::Qr1,
            ridge_delta: DEFAULT_RIDGE_DELTA,
        }
    }
}

impl QuantumReservoirConfig {
    pub fn validate(&self) -> Result<()> {
        let total = self.n_input + self.n_hidden;
        if self.n_input == 0 {
            return Err(Error::Config("quantum reservoir needs at least one input qubit".into()));
        }
        if total > MAX_QUBITS {
            return Err(Error::Config(format!(
                "{} input + {} hidden qubits exceed the limit of {MAX_QUBITS}",
                self.n_input, self.n_hidden
            )));
        }
        if self.lag_depth == 0 {
            return Err(Error::Config("lag depth must be at least 1".into()));
        }
        if !self.tau.is_finite() || !self.field_strength.is_finite() {
            return Err(Error::Config("tau and field strength must be finite".into()));
        }
        if !(self.ridge_delta > 0.0 && self.ridge_delta.is_finite()) {
            return Err(Error::Config(format!("ridge delta must be positive, got {}", self.ridge_delta)));
        }
        Ok(())
    }

    pub fn total_qubits(&self) -> usize {
        self.n_input + self.n_hidden
    }

    /// Length of a measurement vector.
    pub fn feature_len(&self) -> usize {
        match self.ensemble {
            Ensemble::Qr1 => self.total_qubits(),
            Ensemble::Qr2 => 2 * self.total_qubits(),
        }
    }
}

/// Z expectations read from the reservoir for one target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementVector {
    pub target_date: Option<Month>,
    pub values: Vec<f64>,
}

type BasisKey = (usize, u64, u64);

/// Eigenbases are expensive (a 10-qubit register takes over a second), so
/// reservoirs with the same register size, seed and field share one.
fn shared_basis(n_qubits: usize, seed: u64, field: f64) -> Result<Arc<RealEigenBasis>> {
    static BASES: OnceLock<Mutex<HashMap<BasisKey, Arc<RealEigenBasis>>>> = OnceLock::new();
    let key = (n_qubits, seed, field.to_bits());
    let bases = BASES.get_or_init(Default::default);
    if let Some(b) = bases.lock().expect("basis cache poisoned").get(&key) {
        return Ok(b.clone());
    }
    let spec = IsingSpec::sample(n_qubits, seed, field)?;
    let basis = Arc::new(RealEigenBasis::from_operator(&build_ising_hamiltonian(&spec)?)?);
    Ok(bases
        .lock()
        .expect("basis cache poisoned")
        .entry(key)
        .or_insert(basis)
        .clone())
}

/// A configured reservoir with a memo of computed measurement vectors.
pub struct QuantumReservoir {
    config: QuantumReservoirConfig,
    basis: Arc<RealEigenBasis>,
    cache: Mutex<HashMap<Vec<u64>, Arc<[f64]>>>,
}

impl std::fmt::Debug for QuantumReservoir {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QuantumReservoir")
            .field("config", &self.config)
            .field("cached", &self.cache_len())
            .finish()
    }
}

impl QuantumReservoir {
    pub fn new(config: QuantumReservoirConfig) -> Result<Self> {
        config.validate()?;
        let basis = shared_basis(config.total_qubits(), config.coupling_seed, config.field_strength)?;
        Ok(Self {
            config,
            basis,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn config(&self) -> &QuantumReservoirConfig {
        &self.config
    }

    pub fn cache_len(&self) -> usize {
        self.cache.lock().expect("feature cache poisoned").len()
    }

    pub fn clear_cache(&self) {
        self.cache.lock().expect("feature cache poisoned").clear();
    }

    fn check_window<R: AsRef<[f64]>>(&self, window: &[R]) -> Result<()> {
        if window.len() != self.config.lag_depth {
            return Err(Error::Argument(format!(
                "window has {} lags, config expects {}",
                window.len(),
                self.config.lag_depth
            )));
        }
        for row in window {
            let row = row.as_ref();
            if row.len() != self.config.n_input {
                return Err(Error::Argument(format!(
                    "window row has {} angles, config expects {}",
                    row.len(),
                    self.config.n_input
                )));
            }
            check_angles(row)?;
        }
        Ok(())
    }

    /// Measurement vector for a `k × n₁` angle window ordered oldest to newest.
    pub fn extract<R: AsRef<[f64]>>(&self, window: &[R]) -> Result<MeasurementVector> {
        self.check_window(window)?;
        let key: Vec<u64> = window.iter().flat_map(|r| r.as_ref().iter().map(|x| x.to_bits())).collect();
        if let Some(v) = self.cache.lock().expect("feature cache poisoned").get(&key) {
            return Ok(MeasurementVector {
                target_date: None,
                values: v.to_vec(),
            });
        }
        let values = self.simulate(window)?;
        self.cache
            .lock()
            .expect("feature cache poisoned")
            .insert(key, values.clone().into());
        Ok(MeasurementVector {
            target_date: None,
            values,
        })
    }

    /// [`extract`](Self::extract) over many windows, in parallel.
    pub fn extract_batch<R: AsRef<[f64]> + Sync>(&self, windows: &[Vec<R>]) -> Result<Vec<MeasurementVector>> {
        windows.par_iter().map(|w| self.extract(w)).collect()
    }

    fn simulate<R: AsRef<[f64]>>(&self, window: &[R]) -> Result<Vec<f64>> {
        let cfg = &self.config;
        let mut hidden = FactoredState::ground(cfg.n_hidden);
        let last = window.len() - 1;
        // With no hidden register nothing survives the trace, so only the last row counts.
        let first = if cfg.n_hidden == 0 { last } else { 0 };
        for (lag, row) in window.iter().enumerate().skip(first) {
            let joint = hidden.prepend_real_pure(&product_amplitudes(row.as_ref()));
            let coeffs = self.basis.coefficients(&joint);
            let evolved = self.basis.propagate(&coeffs, cfg.tau);
            if lag < last {
                hidden = evolved.partial_trace_first(cfg.n_input)?;
                continue;
            }
            let mut values = evolved.z_expectations();
            if cfg.ensemble == Ensemble::Qr2 {
                values.extend(self.basis.propagate(&coeffs, cfg.tau / 2.0).z_expectations());
            }
            return Ok(values);
        }
        unreachable!("window length checked above")
    }
}

/// Builds a reservoir for `config` and extracts one measurement vector.
pub fn extract_features<R: AsRef<[f64]>>(window: &[R], config: &QuantumReservoirConfig) -> Result<MeasurementVector> {
    QuantumReservoir::new(config.clone())?.extract(window)
}

pub fn fit_readout(features: &[MeasurementVector], targets: &[f64], delta: f64) -> Result<ReadoutWeights> {
    let rows: Vec<&[f64]> = features.iter().map(|m| m.values.as_slice()).collect();
    ridge_fit(&rows, targets, delta)
}

pub fn predict(features: &MeasurementVector, weights: &ReadoutWeights) -> Result<f64> {
    weights.predict(&features.values)
}

/// QR1/QR2 as a rolling-window forecaster over named frame columns.
#[derive(Clone, Debug)]
pub struct QuantumForecaster {
    name: String,
    features: Vec<String>,
    reservoir: Arc<QuantumReservoir>,
}

impl QuantumForecaster {
    /// `config.n_input` must equal the number of features.
    pub fn new(name: impl Into<String>, features: Vec<String>, config: QuantumReservoirConfig) -> Result<Self> {
        if features.len() != config.n_input {
            return Err(Error::Config(format!(
                "{} features but {} input qubits",
                features.len(),
                config.n_input
            )));
        }
        for f in &features {
            FeatureFrame::column_index(f)?;
        }
        Ok(Self {
            name: name.into(),
            features,
            reservoir: Arc::new(QuantumReservoir::new(config)?),
        })
    }

    pub fn reservoir(&self) -> &QuantumReservoir {
        &self.reservoir
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    /// Fits on `train` and returns the concrete fitted model.
    pub fn fit_quantum(&self, frame: &FeatureFrame, train: Range<usize>) -> Result<FittedQuantum> {
        let k = self.reservoir.config.lag_depth;
        if train.end > frame.len() || train.len() < k + 2 {
            return Err(Error::Window(format!(
                "training span {train:?} is too short for lag depth {k}"
            )));
        }
        let cols = frame.columns(&self.features)?;
        let scaler = AngleScaler::fit(&cols, train.clone())?;
        let angles = scaler.transform_columns(&cols, train.clone());
        let windows: Vec<Vec<&Vec<f64>>> = (k..angles.len())
            .map(|i| angles[i - k..i].iter().collect())
            .collect();
        let features = self.reservoir.extract_batch(&windows)?;
        let targets = &frame.log_rv()[train.start + k..train.end];
        let weights = fit_readout(&features, targets, self.reservoir.config.ridge_delta)?;
        Ok(FittedQuantum {
            features: self.features.clone(),
            reservoir: self.reservoir.clone(),
            scaler,
            weights,
        })
    }
}

impl Forecaster for QuantumForecaster {
    fn name(&self) -> &str {
        &self.name
    }

    /// Windows share the feature cache; parallelism happens across samples.
    fn parallel_windows(&self) -> bool {
        false
    }

    fn fit(&self, frame: &FeatureFrame, train: Range<usize>) -> Result<Box<dyn FittedForecaster>> {
        Ok(Box::new(self.fit_quantum(frame, train)?))
    }
}

#[derive(Debug)]
pub struct FittedQuantum {
    features: Vec<String>,
    reservoir: Arc<QuantumReservoir>,
    scaler: AngleScaler,
    weights: ReadoutWeights,
}

impl FittedQuantum {
    pub fn scaler(&self) -> &AngleScaler {
        &self.scaler
    }

    pub fn weights(&self) -> &ReadoutWeights {
        &self.weights
    }

    /// Raw (unscaled) `k × n₁` lag grid for `target`, oldest lag first.
    pub fn lag_grid(&self, frame: &FeatureFrame, target: usize) -> Result<Vec<Vec<f64>>> {
        let k = self.reservoir.config.lag_depth;
        if target < k || target > frame.len() {
            return Err(Error::Window(format!("target row {target} has fewer than {k} lags")));
        }
        let cols = frame.columns(&self.features)?;
        Ok((target - k..target)
            .map(|t| cols.iter().map(|c| c[t]).collect())
            .collect())
    }

    /// Forecast from a raw lag grid.
    pub fn predict_grid<R: AsRef<[f64]>>(&self, grid: &[R]) -> Result<f64> {
        let angles: Vec<Vec<f64>> = grid.iter().map(|r| self.scaler.transform_row(r.as_ref())).collect();
        predict(&self.reservoir.extract(&angles)?, &self.weights)
    }
}

impl FittedForecaster for FittedQuantum {
    fn forecast(&self, frame: &FeatureFrame, target: usize) -> Result<f64> {
        self.predict_grid(&self.lag_grid(frame, target)?)
    }
}
