//! Echo state network baselines (RC and RCX).
//!
//! The state update is `h_t = (1-α) h_{t-1} + tanh(W_r h_{t-1} + W_in x_t + b)`;
//! the activation term is not scaled by `α`.

use std::ops::Range;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::backtest::{FittedForecaster, Forecaster};
use crate::dataset::{AngleScaler, FeatureFrame, EXOGENOUS, RV};
use crate::error::{Error, Result};
use crate::ridge::{ridge_fit, ReadoutWeights, DEFAULT_RIDGE_DELTA};

pub const DEFAULT_WASHOUT: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EsnConfig {
    pub n_hidden: usize,
    pub leak_rate: f64,
    pub spectral_radius: f64,
    /// Multiplies `W_in`.
    pub input_scale: f64,
    pub seed: u64,
    pub ridge_delta: f64,
    /// Leading states left out of the readout fit.
    pub washout: usize,
}

impl EsnConfig {
    /// 50 hidden units, lagged RV only.
    pub fn rc() -> Self {
        Self {
            n_hidden: 50,
            leak_rate: 0.6,
            spectral_radius: 0.9,
            input_scale: 1.0,
            seed: 0,
            ridge_delta: DEFAULT_RIDGE_DELTA,
            washout: DEFAULT_WASHOUT,
        }
    }

    /// 20 hidden units, RV plus exogenous features.
    pub fn rcx() -> Self {
        Self {
            n_hidden: 20,
            ..Self::rc()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_hidden == 0 {
            return Err(Error::Config("echo state network needs hidden units".into()));
        }
        if !(self.leak_rate > 0.0 && self.leak_rate <= 1.0) {
            return Err(Error::Config(format!("leak rate {} is outside (0, 1]", self.leak_rate)));
        }
        if !(self.spectral_radius.is_finite() && self.spectral_radius >= 0.0) {
            return Err(Error::Config("spectral radius must be finite and non-negative".into()));
        }
        if !self.input_scale.is_finite() {
            return Err(Error::Config("input scale must be finite".into()));
        }
        if !(self.ridge_delta > 0.0 && self.ridge_delta.is_finite()) {
            return Err(Error::Config("ridge delta must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EsnState {
    pub hidden: Vec<f64>,
}

impl EsnState {
    pub fn zeros(n: usize) -> Self {
        Self { hidden: vec![0.0; n] }
    }
}

/// Largest eigenvalue modulus of a square matrix.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Fixed random reservoir weights.
#[derive(Clone, Debug)]
pub struct EchoStateNetwork {
    config: EsnConfig,
    w_r: DMatrix<f64>,
    w_in: DMatrix<f64>,
    bias: DVector<f64>,
}

impl EchoStateNetwork {
    /// Samples `W_r`, `W_in ~ U[-1, 1]` and `b ~ U[-0.1, 0.1]` in that order,
    /// row-major, then rescales `W_r` to the configured spectral radius.
    pub fn new(config: EsnConfig, n_inputs: usize) -> Result<Self> {
        config.validate()?;
        let n = config.n_hidden;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut w_r = DMatrix::from_row_iterator(n, n, (0..n * n).map(|_| rng.gen_range(-1.0..=1.0)));
        let w_in = DMatrix::from_row_iterator(n, n_inputs, (0..n * n_inputs).map(|_| rng.gen_range(-1.0..=1.0)));
        let bias = DVector::from_iterator(n, (0..n).map(|_| rng.gen_range(-0.1..=0.1)));
        let radius = spectral_radius(&w_r);
        if radius > 0.0 {
            w_r *= config.spectral_radius / radius;
        }
        Ok(Self { config, w_r, w_in, bias })
    }

    /// Uses the given matrices unchanged.
    pub fn from_matrices(config: EsnConfig, w_r: DMatrix<f64>, w_in: DMatrix<f64>, bias: DVector<f64>) -> Result<Self> {
        config.validate()?;
        let n = config.n_hidden;
        if w_r.shape() != (n, n) || w_in.nrows() != n || bias.len() != n {
            return Err(Error::Argument("reservoir matrix shapes do not match n_hidden".into()));
        }
        Ok(Self { config, w_r, w_in, bias })
    }

    pub fn config(&self) -> &EsnConfig {
        &self.config
    }

    pub fn n_inputs(&self) -> usize {
        self.w_in.ncols()
    }

    pub fn recurrent(&self) -> &DMatrix<f64> {
        &self.w_r
    }

    /// `W_r h + s·W_in x + b`.
    pub fn pre_activation(&self, state: &EsnState, input: &[f64]) -> Result<Vec<f64>> {
        if state.hidden.len() != self.config.n_hidden || input.len() != self.n_inputs() {
            return Err(Error::Argument(format!(
                "state/input lengths {}/{} do not match reservoir {}/{}",
                state.hidden.len(),
                input.len(),
                self.config.n_hidden,
                self.n_inputs()
            )));
        }
        if input.iter().any(|x| !x.is_finite()) {
            return Err(Error::Data("non-finite reservoir input".into()));
        }
        let h = DVector::from_column_slice(&state.hidden);
        let x = DVector::from_column_slice(input);
        let z = &self.w_r * h + (&self.w_in * x) * self.config.input_scale + &self.bias;
        Ok(z.iter().copied().collect())
    }

    pub fn step(&self, state: &EsnState, input: &[f64]) -> Result<EsnState> {
        let z = self.pre_activation(state, input)?;
        let keep = 1.0 - self.config.leak_rate;
        Ok(EsnState {
            hidden: state.hidden.iter().zip(z).map(|(h, z)| keep * h + z.tanh()).collect(),
        })
    }

    /// States after each input row, starting from zero.
    pub fn features<R: AsRef<[f64]>>(&self, series: &[R]) -> Result<Vec<Vec<f64>>> {
        let mut state = EsnState::zeros(self.config.n_hidden);
        let mut out = Vec::with_capacity(series.len());
        for x in series {
            state = self.step(&state, x.as_ref())?;
            out.push(state.hidden.clone());
        }
        Ok(out)
    }
}

pub fn esn_step(state: &EsnState, input: &[f64], network: &EchoStateNetwork) -> Result<EsnState> {
    network.step(state, input)
}

/// Runs the network over `inputs` and fits a ridge readout mapping the state
/// after row `t-1` to `train_targets[t]`, skipping the washout. Returns
/// forecasts for rows `train_targets.len() ..= inputs.len()`.
pub fn esn_fit_predict<R: AsRef<[f64]>>(
    network: &EchoStateNetwork,
    inputs: &[R],
    train_targets: &[f64],
) -> Result<(ReadoutWeights, Vec<f64>)> {
    let n_train = train_targets.len();
    let washout = network.config.washout;
    if n_train > inputs.len() || n_train < washout + 3 {
        return Err(Error::Window(format!(
            "{n_train} training rows with {} inputs cannot cover a washout of {washout}",
            inputs.len()
        )));
    }
    let states = network.features(inputs)?;
    let rows: Vec<&[f64]> = (washout + 1..n_train).map(|t| states[t - 1].as_slice()).collect();
    let weights = ridge_fit(&rows, &train_targets[washout + 1..], network.config.ridge_delta)?;
    let forecasts = (n_train..=inputs.len())
        .map(|t| weights.predict(&states[t - 1]))
        .collect::<Result<Vec<_>>>()?;
    Ok((weights, forecasts))
}

/// RC/RCX over named frame columns; inputs are training-span angles divided by π.
#[derive(Clone, Debug)]
pub struct EsnForecaster {
    name: String,
    features: Vec<String>,
    network: Arc<EchoStateNetwork>,
}

impl EsnForecaster {
    pub fn new(name: impl Into<String>, features: Vec<String>, config: EsnConfig) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::Config("echo state network needs at least one input feature".into()));
        }
        for f in &features {
            FeatureFrame::column_index(f)?;
        }
        let network = Arc::new(EchoStateNetwork::new(config, features.len())?);
        Ok(Self {
            name: name.into(),
            features,
            network,
        })
    }

    pub fn rc(seed: u64) -> Result<Self> {
        Self::new("RC", vec![RV.to_string()], EsnConfig { seed, ..EsnConfig::rc() })
    }

    pub fn rcx(seed: u64) -> Result<Self> {
        let features = std::iter::once(RV).chain(EXOGENOUS).map(String::from).collect();
        Self::new("RCX", features, EsnConfig { seed, ..EsnConfig::rcx() })
    }

    pub fn network(&self) -> &EchoStateNetwork {
        &self.network
    }
}

fn scaled_inputs(scaler: &AngleScaler, cols: &[&[f64]], rows: Range<usize>) -> Vec<Vec<f64>> {
    scaler
        .transform_columns(cols, rows)
        .into_iter()
        .map(|r| r.into_iter().map(|a| a / std::f64::consts::PI).collect())
        .collect()
}

impl Forecaster for EsnForecaster {
    fn name(&self) -> &str {
        &self.name
    }

    fn fit(&self, frame: &FeatureFrame, train: Range<usize>) -> Result<Box<dyn FittedForecaster>> {
        if train.end > frame.len() || train.is_empty() {
            return Err(Error::Window(format!("bad training span {train:?}")));
        }
        let cols = frame.columns(&self.features)?;
        let scaler = AngleScaler::fit(&cols, train.clone())?;
        let inputs = scaled_inputs(&scaler, &cols, train.clone());
        let targets = &frame.log_rv()[train.clone()];
        let (weights, _) = esn_fit_predict(&self.network, &inputs, targets)?;
        Ok(Box::new(FittedEsn {
            features: self.features.clone(),
            network: self.network.clone(),
            scaler,
            weights,
            start: train.start,
        }))
    }
}

struct FittedEsn {
    features: Vec<String>,
    network: Arc<EchoStateNetwork>,
    scaler: AngleScaler,
    weights: ReadoutWeights,
    start: usize,
}

impl FittedForecaster for FittedEsn {
    fn forecast(&self, frame: &FeatureFrame, target: usize) -> Result<f64> {
        if target <= self.start || target > frame.len() {
            return Err(Error::Window(format!("target row {target} precedes the reservoir start")));
        }
        let cols = frame.columns(&self.features)?;
        let inputs = scaled_inputs(&self.scaler, &cols, self.start..target);
        let states = self.network.features(&inputs)?;
        self.weights.predict(states.last().expect("non-empty input span"))
    }
}
