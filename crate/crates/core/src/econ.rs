//! Linear econometric baselines on monthly log-RV: AR(p), HAR, HARX, ARMAX.

use std::ops::Range;

use argmin::core::{CostFunction, Executor, State, TerminationReason, TerminationStatus};
use argmin::solver::neldermead::NelderMead;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::backtest::{FittedForecaster, Forecaster};
use crate::dataset::{FeatureFrame, EXOGENOUS};
use crate::error::{Error, Result};

/// Penalty used when a design matrix is rank deficient.
pub const OLS_FALLBACK_DELTA: f64 = 1e-8;
/// Diagonal entries of `R` below this fraction of the largest mark the design as rank deficient.
const RANK_TOL: f64 = 1e-10;
const CSS_REL_TOL: f64 = 1e-10;
const CSS_MAX_ITERS: u64 = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ModelKind {
    Ar,
    Har,
    Harx,
    Armax,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearSpec {
    pub model_kind: ModelKind,
    /// AR order `p` (AR and ARMAX).
    #[serde(default)]
    pub ar_order: usize,
    /// MA order `q` (ARMAX only).
    #[serde(default)]
    pub ma_order: usize,
    /// Lags of each exogenous column (HARX and ARMAX).
    #[serde(default)]
    pub exo_lags: usize,
    #[serde(default = "default_exogenous")]
    pub exogenous: Vec<String>,
}

fn default_exogenous() -> Vec<String> {
    EXOGENOUS.iter().map(|s| s.to_string()).collect()
}

impl LinearSpec {
    pub fn ar(p: usize) -> Self {
        Self {
            model_kind: ModelKind::Ar,
            ar_order: p,
            ma_order: 0,
            exo_lags: 0,
            exogenous: Vec::new(),
        }
    }

    pub fn har() -> Self {
        Self {
            model_kind: ModelKind::Har,
            ..Self::ar(0)
        }
    }

    pub fn harx() -> Self {
        Self {
            model_kind: ModelKind::Harx,
            exo_lags: 1,
            exogenous: default_exogenous(),
            ..Self::ar(0)
        }
    }

    /// ARMAX(3,1) with one lag of each exogenous column.
    pub fn armax() -> Self {
        Self {
            model_kind: ModelKind::Armax,
            ar_order: 3,
            ma_order: 1,
            exo_lags: 1,
            exogenous: default_exogenous(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.model_kind {
            ModelKind::Ar | ModelKind::Armax if self.ar_order == 0 => {
                Err(Error::Config("AR order must be at least 1".into()))
            }
            ModelKind::Harx | ModelKind::Armax if self.exogenous.is_empty() || self.exo_lags == 0 => Err(
                Error::Config(format!("{:?} needs exogenous columns and at least one lag", self.model_kind)),
            ),
            _ => {
                for name in &self.exogenous {
                    FeatureFrame::column_index(name)?;
                }
                Ok(())
            }
        }
    }

    /// Rows of history a regressor at row `t` reads.
    pub fn min_history(&self) -> usize {
        match self.model_kind {
            ModelKind::Ar => self.ar_order,
            ModelKind::Har => 12,
            ModelKind::Harx => self.exo_lags.max(12),
            ModelKind::Armax => self.exo_lags.max(self.ar_order),
        }
    }

    pub fn regressor_names(&self) -> Vec<String> {
        let mut names = vec!["const".to_string()];
        match self.model_kind {
            ModelKind::Har | ModelKind::Harx => {
                names.extend(["rv_lag1", "rv_mean3", "rv_mean12"].map(String::from));
            }
            ModelKind::Ar | ModelKind::Armax => {
                names.extend((1..=self.ar_order).map(|i| format!("ar{i}")));
            }
        }
        if matches!(self.model_kind, ModelKind::Harx | ModelKind::Armax) {
            for name in &self.exogenous {
                names.extend((1..=self.exo_lags).map(|l| format!("{name}_lag{l}")));
            }
        }
        names
    }

    /// Design row for target row `t` (reads rows `t - min_history .. t`).
    pub fn design_row(&self, log_rv: &[f64], exo: &[&[f64]], t: usize) -> Result<Vec<f64>> {
        if t < self.min_history() || t > log_rv.len() {
            return Err(Error::Window(format!(
                "row {t} lacks the {} rows of history the model needs",
                self.min_history()
            )));
        }
        let mut row = vec![1.0];
        match self.model_kind {
            ModelKind::Har | ModelKind::Harx => row.extend(build_har_regressors(log_rv, t)?),
            ModelKind::Ar | ModelKind::Armax => row.extend((1..=self.ar_order).map(|i| log_rv[t - i])),
        }
        if matches!(self.model_kind, ModelKind::Harx | ModelKind::Armax) {
            for col in exo {
                row.extend((1..=self.exo_lags).map(|l| col[t - l]));
            }
        }
        Ok(row)
    }
}

/// `(RV_{t-1}, mean RV_{t-3..t-1}, mean RV_{t-12..t-1})` for 0-based row `t`.
pub fn build_har_regressors(log_rv: &[f64], t: usize) -> Result<[f64; 3]> {
    if t < 12 || t > log_rv.len() {
        return Err(Error::Window(format!("HAR regressors at row {t} need 12 prior months")));
    }
    let mean = |span: usize| log_rv[t - span..t].iter().sum::<f64>() / span as f64;
    Ok([log_rv[t - 1], mean(3), mean(12)])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FittedLinearModel {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    /// Moving-average coefficients (empty unless ARMAX with q > 0).
    pub ma: Vec<f64>,
    pub residual_variance: f64,
    /// Rows whose targets entered the fit.
    pub sample_span: Range<usize>,
    /// Set when the design was rank deficient and ridge was used instead.
    pub ridge_fallback: bool,
    pub residuals: Vec<f64>,
}

impl FittedLinearModel {
    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.coefficients[i])
    }
}

fn check_design<R: AsRef<[f64]>>(rows: &[R], targets: &[f64]) -> Result<usize> {
    if rows.len() != targets.len() {
        return Err(Error::Argument(format!("{} rows but {} targets", rows.len(), targets.len())));
    }
    let p = rows.first().map_or(0, |r| r.as_ref().len());
    if p == 0 || rows.len() < p {
        return Err(Error::Argument(format!("{} rows cannot identify {p} coefficients", rows.len())));
    }
    for (i, (r, y)) in rows.iter().zip(targets).enumerate() {
        let r = r.as_ref();
        if r.len() != p {
            return Err(Error::Argument(format!("design row {i} has {} columns, expected {p}", r.len())));
        }
        if !y.is_finite() || r.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data(format!("non-finite value in design row {i}")));
        }
    }
    Ok(p)
}

/// Least squares through a QR factorization, falling back to ridge with
/// [`OLS_FALLBACK_DELTA`] when the design is rank deficient.
/// Returns the coefficients and whether the fallback was taken.
fn least_squares<R: AsRef<[f64]>>(rows: &[R], targets: &[f64]) -> Result<(Vec<f64>, bool)> {
    let p = check_design(rows, targets)?;
    let x = DMatrix::from_fn(rows.len(), p, |i, j| rows[i].as_ref()[j]);
    let y = DVector::from_column_slice(targets);
    let qr = x.clone().qr();
    let r = qr.r();
    let max_diag = r.diagonal().iter().map(|v| v.abs()).fold(0.0, f64::max);
    let deficient = max_diag == 0.0 || r.diagonal().iter().any(|v| v.abs() <= RANK_TOL * max_diag);
    if !deficient {
        let qty = qr.q().transpose() * &y;
        if let Some(beta) = r.solve_upper_triangular(&qty) {
            return Ok((beta.iter().copied().collect(), false));
        }
    }
    let mut gram = x.transpose() * &x;
    for i in 0..p {
        gram[(i, i)] += OLS_FALLBACK_DELTA;
    }
    let rhs = x.transpose() * y;
    let beta = gram
        .cholesky()
        .map(|c| c.solve(&rhs))
        .ok_or_else(|| Error::Data("ridge fallback failed on a degenerate design".into()))?;
    Ok((beta.iter().copied().collect(), true))
}

fn residuals<R: AsRef<[f64]>>(rows: &[R], targets: &[f64], beta: &[f64]) -> Vec<f64> {
    rows.iter()
        .zip(targets)
        .map(|(r, y)| y - r.as_ref().iter().zip(beta).map(|(a, b)| a * b).sum::<f64>())
        .collect()
}

/// Ordinary least squares on a design that already contains any intercept column.
pub fn fit_ols<R: AsRef<[f64]>>(rows: &[R], targets: &[f64]) -> Result<FittedLinearModel> {
    let (beta, ridge_fallback) = least_squares(rows, targets)?;
    let res = residuals(rows, targets, &beta);
    let names = (0..beta.len()).map(|i| format!("x{i}")).collect();
    Ok(FittedLinearModel {
        names,
        residual_variance: res.iter().map(|e| e * e).sum::<f64>() / res.len() as f64,
        coefficients: beta,
        ma: Vec::new(),
        sample_span: 0..targets.len(),
        ridge_fallback,
        residuals: res,
    })
}

/// `z̃_t = z_t − Σ θ_i z̃_{t−i}` with zero start-up values.
fn ma_filter(z: &[f64], theta: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; z.len()];
    for t in 0..z.len() {
        let mut v = z[t];
        for (i, th) in theta.iter().enumerate() {
            if t > i {
                v -= th * out[t - 1 - i];
            }
        }
        out[t] = v;
    }
    out
}

/// All roots of `1 + θ₁z + … + θ_q z^q` lie outside the unit circle.
fn invertible(theta: &[f64]) -> bool {
    let q = theta.len();
    if q == 0 {
        return true;
    }
    if theta.iter().any(|t| !t.is_finite()) {
        return false;
    }
    // Companion of z^q + θ₁z^{q-1} + … + θ_q; its roots are the reciprocals.
    let mut c = DMatrix::zeros(q, q);
    for j in 0..q {
        c[(0, j)] = -theta[j];
    }
    for i in 1..q {
        c[(i, i - 1)] = 1.0;
    }
    c.complex_eigenvalues().iter().all(|z| z.norm() < 1.0 - 1e-9)
}

struct Css<'a> {
    rows: &'a [Vec<f64>],
    targets: &'a [f64],
}

impl Css<'_> {
    /// Concentrated CSS: the linear coefficients solve OLS on filtered data.
    fn profile(&self, theta: &[f64]) -> Result<(f64, Vec<f64>, bool)> {
        let p = self.rows[0].len();
        let y = ma_filter(self.targets, theta);
        let cols: Vec<Vec<f64>> = (0..p)
            .map(|j| ma_filter(&self.rows.iter().map(|r| r[j]).collect::<Vec<_>>(), theta))
            .collect();
        let x: Vec<Vec<f64>> = (0..y.len()).map(|t| cols.iter().map(|c| c[t]).collect()).collect();
        let (beta, fallback) = least_squares(&x, &y)?;
        let css = residuals(&x, &y, &beta).iter().map(|e| e * e).sum();
        Ok((css, beta, fallback))
    }
}

impl CostFunction for Css<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, theta: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        if !invertible(theta) {
            return Ok(f64::INFINITY);
        }
        Ok(self.profile(theta).map(|r| r.0).unwrap_or(f64::INFINITY))
    }
}

/// ARMAX by conditional sum of squares. Pre-sample errors are zero. The
/// MA coefficients are searched by Nelder–Mead from zero (the OLS solution)
/// while the AR, exogenous and intercept coefficients are concentrated out.
pub fn fit_armax<R: AsRef<[f64]>>(rows: &[R], targets: &[f64], q: usize) -> Result<FittedLinearModel> {
    check_design(rows, targets)?;
    let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.as_ref().to_vec()).collect();
    let css = Css { rows: &rows, targets };
    let (theta, _) = if q == 0 {
        (Vec::new(), 0.0)
    } else {
        let (css0, ..) = css.profile(&vec![0.0; q])?;
        let mut simplex = vec![vec![0.0; q]];
        for i in 0..q {
            let mut v = vec![0.0; q];
            v[i] = 0.1;
            simplex.push(v);
        }
        let solver = NelderMead::new(simplex)
            .with_sd_tolerance(CSS_REL_TOL * css0.max(f64::MIN_POSITIVE))
            .map_err(|e| Error::Argument(e.to_string()))?;
        let run = Executor::new(Css { rows: &rows, targets }, solver)
            .configure(|s| s.max_iters(CSS_MAX_ITERS))
            .run()
            .map_err(|e| Error::Fit {
                message: e.to_string(),
                best: vec![0.0; q],
            })?;
        let best = run.state.get_best_param().cloned().unwrap_or_else(|| vec![0.0; q]);
        if let TerminationStatus::Terminated(TerminationReason::MaxItersReached) = run.state.get_termination_status() {
            return Err(Error::Fit {
                message: format!("CSS search did not converge in {CSS_MAX_ITERS} iterations"),
                best,
            });
        }
        let cost = run.state.get_best_cost();
        (best, cost)
    };
    let (_, beta, ridge_fallback) = css.profile(&theta)?;
    let y = ma_filter(targets, &theta);
    let p = rows[0].len();
    let cols: Vec<Vec<f64>> = (0..p)
        .map(|j| ma_filter(&rows.iter().map(|r| r[j]).collect::<Vec<_>>(), &theta))
        .collect();
    let x: Vec<Vec<f64>> = (0..y.len()).map(|t| cols.iter().map(|c| c[t]).collect()).collect();
    let res = residuals(&x, &y, &beta);
    Ok(FittedLinearModel {
        names: (0..p).map(|i| format!("x{i}")).collect(),
        residual_variance: res.iter().map(|e| e * e).sum::<f64>() / res.len() as f64,
        coefficients: beta,
        ma: theta,
        sample_span: 0..targets.len(),
        ridge_fallback,
        residuals: res,
    })
}

/// A [`LinearSpec`] estimated on a span of a frame.
#[derive(Clone, Debug)]
pub struct FittedSpec {
    pub spec: LinearSpec,
    pub model: FittedLinearModel,
}

impl FittedSpec {
    fn exo<'a>(&self, frame: &'a FeatureFrame) -> Result<Vec<&'a [f64]>> {
        frame.columns(&self.spec.exogenous)
    }

    /// Forecast for row `target`. ARMAX residuals are recursed from the start
    /// of the estimation span up to `target - 1`.
    pub fn forecast_one_step(&self, frame: &FeatureFrame, target: usize) -> Result<f64> {
        let y = frame.log_rv();
        let exo = self.exo(frame)?;
        let x = self.spec.design_row(y, &exo, target)?;
        let linear: f64 = x.iter().zip(&self.model.coefficients).map(|(a, b)| a * b).sum();
        if self.model.ma.is_empty() {
            return Ok(linear);
        }
        let start = self.model.sample_span.start;
        if target < start {
            return Err(Error::Window(format!("target row {target} precedes the estimation span")));
        }
        let q = self.model.ma.len();
        let mut errors: Vec<f64> = Vec::with_capacity(target - start);
        for t in start..target {
            let row = self.spec.design_row(y, &exo, t)?;
            let mut e = y[t] - row.iter().zip(&self.model.coefficients).map(|(a, b)| a * b).sum::<f64>();
            for (i, th) in self.model.ma.iter().enumerate() {
                if errors.len() > i {
                    e -= th * errors[errors.len() - 1 - i];
                }
            }
            errors.push(e);
        }
        let ma: f64 = (0..q.min(errors.len()))
            .map(|i| self.model.ma[i] * errors[errors.len() - 1 - i])
            .sum();
        Ok(linear + ma)
    }
}

/// Estimates `spec` on frame rows `train`.
pub fn fit_spec(spec: &LinearSpec, frame: &FeatureFrame, train: Range<usize>) -> Result<FittedSpec> {
    spec.validate()?;
    let y = frame.log_rv();
    let exo = frame.columns(&spec.exogenous)?;
    let first = train.start + spec.min_history();
    if train.end > frame.len() || first >= train.end {
        return Err(Error::Window(format!(
            "training span {train:?} leaves no rows after {} months of history",
            spec.min_history()
        )));
    }
    let rows: Vec<Vec<f64>> = (first..train.end)
        .map(|t| spec.design_row(y, &exo, t))
        .collect::<Result<_>>()?;
    let targets = &y[first..train.end];
    let mut model = if spec.model_kind == ModelKind::Armax {
        fit_armax(&rows, targets, spec.ma_order)?
    } else {
        fit_ols(&rows, targets)?
    };
    model.names = spec.regressor_names();
    model.sample_span = first..train.end;
    if model.ridge_fallback {
        log::warn!("{:?} design on rows {first}..{} is rank deficient; ridge fallback used", spec.model_kind, train.end);
    }
    Ok(FittedSpec {
        spec: spec.clone(),
        model,
    })
}

#[derive(Clone, Debug)]
pub struct LinearForecaster {
    name: String,
    spec: LinearSpec,
}

impl LinearForecaster {
    pub fn new(name: impl Into<String>, spec: LinearSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self { name: name.into(), spec })
    }

    pub fn spec(&self) -> &LinearSpec {
        &self.spec
    }
}

impl Forecaster for LinearForecaster {
    fn name(&self) -> &str {
        &self.name
    }

    fn fit(&self, frame: &FeatureFrame, train: Range<usize>) -> Result<Box<dyn FittedForecaster>> {
        Ok(Box::new(fit_spec(&self.spec, frame, train)?))
    }
}

impl FittedForecaster for FittedSpec {
    fn forecast(&self, frame: &FeatureFrame, target: usize) -> Result<f64> {
        self.forecast_one_step(frame, target)
    }
}
