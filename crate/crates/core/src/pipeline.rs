//! Configuration and command implementations behind the `qrc-vol` binary.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::backtest::{run_backtest, ForecastRun, Forecaster, Protocol};
use crate::dataset::{
    assemble_frame, compute_monthly_log_rv, fmt_f64, load_daily, load_features, load_frame, FeatureFrame,
    RollingPlan, DEFAULT_OUT_OF_SAMPLE, EXOGENOUS, FRAME_COLUMNS, RV,
};
use crate::econ::{LinearForecaster, LinearSpec, ModelKind};
use crate::error::{Error, Result};
use crate::esn::{EsnConfig, EsnForecaster};
use crate::evaluation::{write_text, BootstrapConfig, EvaluationConfig, EvaluationReport, LossKind, LOSS_SPACE_NOTE};
use crate::explain::{
    forward_select, shapley_values, FeaturePool, Grouping, GroupingStrategy, SelectionTrace, ShapleyReport,
    DEFAULT_SHAPLEY_SAMPLES,
};
use crate::qrc::{Ensemble, QuantumForecaster, QuantumReservoirConfig, QR1_FEATURES, QR2_FEATURES};

/// Model names of the default benchmark matrix, in report order.
pub const DEFAULT_MODELS: [&str; 9] = ["HAR", "HARX", "AR1", "AR3", "ARMAX", "RC", "RCX", "QR1", "QR2"];

/// Published real-data (MSE, QLIKE) figures, used only to report deviations.
#[allow(clippy::approx_constant)]
pub const REFERENCE_LOSSES: [(&str, f64, f64); 9] = [
    ("HAR", 0.1476, 2.0431),
    ("HARX", 0.1508, 2.2436),
    ("AR1", 0.1304, 1.7279),
    ("AR3", 0.1178, 1.5893),
    ("ARMAX", 0.1145, 1.6196),
    ("RC", 0.1441, 2.1011),
    ("RCX", 0.1089, 1.6480),
    ("QR1", 0.105, 1.4427),
    ("QR2", 0.103, 1.4004),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelSpec {
    Linear { spec: LinearSpec },
    Esn { features: Vec<String>, config: EsnConfig },
    Quantum { features: Vec<String>, reservoir: QuantumReservoirConfig },
}

impl ModelSpec {
    pub fn build(&self, name: &str) -> Result<Box<dyn Forecaster>> {
        Ok(match self {
            ModelSpec::Linear { spec } => Box::new(LinearForecaster::new(name, spec.clone())?),
            ModelSpec::Esn { features, config } => Box::new(EsnForecaster::new(name, features.clone(), config.clone())?),
            ModelSpec::Quantum { features, reservoir } => {
                Box::new(QuantumForecaster::new(name, features.clone(), reservoir.clone())?)
            }
        })
    }

    /// The same model on a different feature subset.
    pub fn with_features(&self, subset: &[String]) -> Result<Self> {
        Ok(match self {
            ModelSpec::Linear { spec } => {
                if !matches!(spec.model_kind, ModelKind::Harx | ModelKind::Armax) {
                    return Err(Error::Config(format!(
                        "{:?} models take no feature set to select over",
                        spec.model_kind
                    )));
                }
                ModelSpec::Linear {
                    spec: LinearSpec {
                        exogenous: subset.to_vec(),
                        ..spec.clone()
                    },
                }
            }
            ModelSpec::Esn { config, .. } => ModelSpec::Esn {
                features: subset.to_vec(),
                config: config.clone(),
            },
            ModelSpec::Quantum { reservoir, .. } => {
                let total = reservoir.total_qubits();
                if subset.len() > total {
                    return Err(Error::Config(format!(
                        "{} features do not fit in a {total}-qubit register",
                        subset.len()
                    )));
                }
                ModelSpec::Quantum {
                    features: subset.to_vec(),
                    reservoir: QuantumReservoirConfig {
                        n_input: subset.len(),
                        n_hidden: total - subset.len(),
                        ..reservoir.clone()
                    },
                }
            }
        })
    }
}

fn default_model_blocks() -> BTreeMap<String, ModelSpec> {
    let strings = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let mut m = BTreeMap::new();
    m.insert("AR1".into(), ModelSpec::Linear { spec: LinearSpec::ar(1) });
    m.insert("AR3".into(), ModelSpec::Linear { spec: LinearSpec::ar(3) });
    m.insert("ARMAX".into(), ModelSpec::Linear { spec: LinearSpec::armax() });
    m.insert("HAR".into(), ModelSpec::Linear { spec: LinearSpec::har() });
    m.insert("HARX".into(), ModelSpec::Linear { spec: LinearSpec::harx() });
    m.insert(
        "RC".into(),
        ModelSpec::Esn {
            features: strings(&[RV]),
            config: EsnConfig::rc(),
        },
    );
    let mut rcx = vec![RV];
    rcx.extend(EXOGENOUS);
    m.insert(
        "RCX".into(),
        ModelSpec::Esn {
            features: strings(&rcx),
            config: EsnConfig::rcx(),
        },
    );
    m.insert(
        "QR1".into(),
        ModelSpec::Quantum {
            features: strings(&QR1_FEATURES),
            reservoir: QuantumReservoirConfig::default(),
        },
    );
    m.insert(
        "QR2".into(),
        ModelSpec::Quantum {
            features: strings(&QR2_FEATURES),
            reservoir: QuantumReservoirConfig {
                ensemble: Ensemble::Qr2,
                ..Default::default()
            },
        },
    );
    m
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Paths {
    pub daily_returns: Option<PathBuf>,
    pub features: Option<PathBuf>,
    /// Prepared frame; defaults to `<out>/frame.csv`.
    pub frame: Option<PathBuf>,
    pub out: PathBuf,
}

impl Default for Paths {
    fn default() -> Self {
        Self {
            daily_returns: None,
            features: None,
            frame: None,
            out: PathBuf::from("out"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlanConfig {
    pub n_out_of_sample: usize,
    pub lag_depth: usize,
    pub protocol: Protocol,
}

impl Default for PlanConfig {
    fn default() -> Self {
        Self {
            n_out_of_sample: DEFAULT_OUT_OF_SAMPLE,
            lag_depth: 3,
            protocol: Protocol::Rolling,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvaluationSettings {
    pub alpha: f64,
    pub n_reps: usize,
    pub block_length: usize,
    pub nw_lag: Option<usize>,
}

impl Default for EvaluationSettings {
    fn default() -> Self {
        let b = BootstrapConfig::default();
        Self {
            alpha: 0.05,
            n_reps: b.n_reps,
            block_length: b.block_length,
            nw_lag: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SelectionConfig {
    pub model: String,
    pub pool: Vec<String>,
    pub max_features: usize,
    pub protocol: Protocol,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            model: "QR1".into(),
            pool: FRAME_COLUMNS.iter().map(|s| s.to_string()).collect(),
            max_features: 10,
            protocol: Protocol::Rolling,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShapleyConfig {
    pub model: String,
    pub grouping: GroupingStrategy,
    pub n_samples: usize,
}

impl Default for ShapleyConfig {
    fn default() -> Self {
        Self {
            model: "QR1".into(),
            grouping: GroupingStrategy::TimeLag,
            n_samples: DEFAULT_SHAPLEY_SAMPLES,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub paths: Paths,
    pub plan: PlanConfig,
    /// Models to run, in report order.
    pub enabled: Vec<String>,
    pub models: BTreeMap<String, ModelSpec>,
    /// Seeds the MCS bootstrap and Shapley sampling.
    pub seed: u64,
    /// Worker threads; `None` uses every available core.
    pub threads: Option<usize>,
    pub evaluation: EvaluationSettings,
    pub selection: SelectionConfig,
    pub shapley: ShapleyConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            paths: Paths::default(),
            plan: PlanConfig::default(),
            enabled: DEFAULT_MODELS.iter().map(|s| s.to_string()).collect(),
            models: default_model_blocks(),
            seed: 0,
            threads: None,
            evaluation: EvaluationSettings::default(),
            selection: SelectionConfig::default(),
            shapley: ShapleyConfig::default(),
        }
    }
}

impl RunConfig {
    /// Parses a TOML file. Relative paths are resolved against its directory.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        cfg.paths.daily_returns.iter_mut().for_each(fix);
        cfg.paths.features.iter_mut().for_each(fix);
        cfg.paths.frame.iter_mut().for_each(fix);
        fix(&mut cfg.paths.out);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.enabled.is_empty() {
            return Err(Error::Config("no models enabled".into()));
        }
        for name in &self.enabled {
            let spec = self
                .models
                .get(name)
                .ok_or_else(|| Error::Config(format!("model {name} has no hyperparameter block")))?;
            spec.build(name)?;
        }
        if self.enabled.iter().collect::<std::collections::HashSet<_>>().len() != self.enabled.len() {
            return Err(Error::Config("a model is enabled twice".into()));
        }
        if !(self.evaluation.alpha > 0.0 && self.evaluation.alpha < 1.0) {
            return Err(Error::Config("alpha must lie in (0, 1)".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        Ok(())
    }

    pub fn frame_path(&self) -> PathBuf {
        self.paths.frame.clone().unwrap_or_else(|| self.paths.out.join("frame.csv"))
    }

    pub fn evaluation_config(&self) -> EvaluationConfig {
        EvaluationConfig {
            alpha: self.evaluation.alpha,
            bootstrap: BootstrapConfig {
                n_reps: self.evaluation.n_reps,
                block_length: self.evaluation.block_length,
                seed: self.seed,
            },
            nw_lag: self.evaluation.nw_lag,
        }
    }

    pub fn plan_for(&self, frame: &FeatureFrame) -> Result<RollingPlan> {
        RollingPlan::new(frame.len(), self.plan.n_out_of_sample, self.plan.lag_depth)
    }

    fn model(&self, name: &str) -> Result<&ModelSpec> {
        self.models
            .get(name)
            .ok_or_else(|| Error::Config(format!("model {name} has no hyperparameter block")))
    }

    /// SHA-256 of the canonical TOML rendering.
    pub fn hash(&self) -> Result<String> {
        Ok(sha256_hex(self.to_toml()?.as_bytes()))
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn file_hash(path: &Path) -> Result<String> {
    Ok(sha256_hex(&std::fs::read(path).map_err(|e| Error::io(path, e))?))
}

/// Runs `f` on a pool of `threads` workers (all cores when `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("cannot start thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &(serde_json::to_string_pretty(value)? + "\n"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrepareOutcome {
    pub frame_path: PathBuf,
    pub rows: usize,
    pub summary: String,
    pub warnings: Vec<String>,
}

/// Builds the canonical frame from daily returns and the feature table.
pub fn prepare(config: &RunConfig) -> Result<PrepareOutcome> {
    let daily_path = config
        .paths
        .daily_returns
        .as_ref()
        .ok_or_else(|| Error::Config("paths.daily_returns is not set".into()))?;
    let feat_path = config
        .paths
        .features
        .as_ref()
        .ok_or_else(|| Error::Config("paths.features is not set".into()))?;
    let daily = load_daily(daily_path)?;
    let rv = compute_monthly_log_rv(&daily)?;
    let exo = load_features(feat_path)?;
    let prepared = assemble_frame(&rv, &exo)?;
    let frame_path = config.frame_path();
    if let Some(dir) = frame_path.parent() {
        create_dir(dir)?;
    }
    prepared.frame.write_csv(&frame_path)?;
    let f = &prepared.frame;
    let mut summary = format!(
        "frame: {} rows, {} .. {}",
        f.len(),
        f.months()[0],
        f.months()[f.len() - 1]
    );
    if f.len() == 815 {
        summary.push_str(" (815 months, the full reference period)");
    }
    Ok(PrepareOutcome {
        frame_path,
        rows: f.len(),
        summary,
        warnings: prepared.warnings,
    })
}

#[derive(Clone, Debug, Serialize)]
struct ModelTiming {
    model: String,
    total_seconds: f64,
    window_seconds: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    command: String,
    config_sha256: String,
    frame_sha256: String,
    frame_rows: usize,
    config: RunConfig,
    artifacts: BTreeMap<String, String>,
}

#[derive(Debug)]
pub struct BenchmarkOutcome {
    pub runs: Vec<ForecastRun>,
    pub failures: Vec<(String, String)>,
    pub report: Option<EvaluationReport>,
    pub out_dir: PathBuf,
    pub summary: String,
}

impl BenchmarkOutcome {
    /// 0 on full success, 4 when any model failed.
    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            0
        } else {
            4
        }
    }
}

fn write_manifest(config: &RunConfig, command: &str, frame_path: &Path, frame_rows: usize, files: &[PathBuf]) -> Result<()> {
    let mut artifacts = BTreeMap::new();
    for f in files {
        let name = f
            .strip_prefix(&config.paths.out)
            .unwrap_or(f)
            .to_string_lossy()
            .replace('\\', "/");
        artifacts.insert(name, file_hash(f)?);
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: command.into(),
        config_sha256: config.hash()?,
        frame_sha256: file_hash(frame_path)?,
        frame_rows,
        config: config.clone(),
        artifacts,
    };
    write_json(&config.paths.out.join(format!("manifest_{command}.json")), &manifest)
}

/// Runs every enabled model over the rolling plan, then evaluates them.
/// A failing model is recorded and the others continue.
pub fn benchmark(config: &RunConfig) -> Result<BenchmarkOutcome> {
    config.validate()?;
    let frame_path = config.frame_path();
    let frame = load_frame(&frame_path)?;
    benchmark_frame(config, &frame, &frame_path)
}

/// [`benchmark`] on an already loaded frame; `frame_path` is hashed into the manifest.
pub fn benchmark_frame(config: &RunConfig, frame: &FeatureFrame, frame_path: &Path) -> Result<BenchmarkOutcome> {
    config.validate()?;
    let plan = config.plan_for(frame)?;
    let out = &config.paths.out;
    create_dir(&out.join("forecasts"))?;
    let started = Instant::now();
    let mut runs = Vec::new();
    let mut failures = Vec::new();
    let mut timings = Vec::new();
    let mut files = Vec::new();
    for name in &config.enabled {
        let t0 = Instant::now();
        let result = with_threads(config.threads, || {
            let model = config.model(name)?.build(name)?;
            run_backtest(model.as_ref(), frame, &plan, config.plan.protocol)
        })
        .and_then(|r| r);
        match result {
            Ok(run) => {
                log::info!("{name}: {} forecasts in {:.1}s", run.forecast.len(), t0.elapsed().as_secs_f64());
                let path = out.join("forecasts").join(format!("{name}.csv"));
                run.write_csv(&path)?;
                files.push(path);
                timings.push(ModelTiming {
                    model: name.clone(),
                    total_seconds: t0.elapsed().as_secs_f64(),
                    window_seconds: run.window_seconds.clone(),
                });
                runs.push(run);
            }
            Err(e) => {
                log::error!("{name} failed: {e}");
                failures.push((name.clone(), e.to_string()));
            }
        }
    }

    let mut report = None;
    let mut summary = String::new();
    if runs.len() >= 2 {
        let eval = config.evaluation_config();
        let built = with_threads(config.threads, || -> Result<EvaluationReport> {
            let mse: Vec<_> = runs.iter().map(|r| r.losses(LossKind::Mse)).collect::<Result<_>>()?;
            let ql: Vec<_> = runs.iter().map(|r| r.losses(LossKind::Qlike)).collect::<Result<_>>()?;
            EvaluationReport::build(&mse, &ql, &eval)
        })?;
        match built {
            Ok(r) => {
                for (file, write) in [
                    ("table_mcs.csv", 0usize),
                    ("table_dm_mse.csv", 1),
                    ("table_dm_qlike.csv", 2),
                ] {
                    let path = out.join(file);
                    match write {
                        0 => r.write_mcs_table(&path)?,
                        1 => r.dm_mse.write_csv(&path)?,
                        _ => r.dm_qlike.write_csv(&path)?,
                    }
                    files.push(path);
                }
                let path = out.join("evaluation.json");
                write_json(&path, &r)?;
                files.push(path);
                let path = out.join("reference_deviation.csv");
                write_reference_deviation(&path, &r)?;
                files.push(path);
                summary.push_str(&r.summary());
                report = Some(r);
            }
            Err(e) => {
                failures.push(("evaluation".into(), e.to_string()));
            }
        }
    } else {
        summary.push_str("fewer than two models produced forecasts; no evaluation tables written\n");
    }
    for (name, err) in &failures {
        summary.push_str(&format!("FAILED {name}: {err}\n"));
    }
    let path = out.join("summary.txt");
    write_text(&path, &summary)?;
    files.push(path);
    write_json(
        &out.join("timings.json"),
        &serde_json::json!({
            "wall_clock_seconds": started.elapsed().as_secs_f64(),
            "models": timings,
        }),
    )?;
    write_manifest(config, "benchmark", frame_path, frame.len(), &files)?;
    Ok(BenchmarkOutcome {
        runs,
        failures,
        report,
        out_dir: out.clone(),
        summary,
    })
}

fn write_reference_deviation(path: &Path, report: &EvaluationReport) -> Result<()> {
    let mut out = format!(
        "{LOSS_SPACE_NOTE}\n# reference: published real-data losses; deviations are informative only and are not expected to vanish on other data, coupling seeds or evolution times\nmodel,MSE,reference_MSE,MSE_deviation,QLIKE,reference_QLIKE,QLIKE_deviation\n"
    );
    for (i, m) in report.models.iter().enumerate() {
        if let Some(&(_, rm, rq)) = REFERENCE_LOSSES.iter().find(|r| r.0 == m) {
            out.push_str(&format!(
                "{m},{},{},{},{},{},{}\n",
                fmt_f64(report.mse[i]),
                fmt_f64(rm),
                fmt_f64(report.mse[i] - rm),
                fmt_f64(report.qlike[i]),
                fmt_f64(rq),
                fmt_f64(report.qlike[i] - rq)
            ));
        }
    }
    write_text(path, &out)
}

/// Forward selection for `config.selection.model`.
pub fn select(config: &RunConfig) -> Result<SelectionTrace> {
    config.validate()?;
    let frame_path = config.frame_path();
    let frame = load_frame(&frame_path)?;
    let plan = config.plan_for(&frame)?;
    let sel = &config.selection;
    let base = config.model(&sel.model)?.clone();
    let pool = FeaturePool::new(sel.pool.clone())?;
    if sel.max_features == 0 || sel.max_features > pool.names().len() {
        return Err(Error::Config(format!(
            "max_features = {} must lie in 1..={}",
            sel.max_features,
            pool.names().len()
        )));
    }
    // the largest subset the search can reach must still build
    base.with_features(&pool.names()[..sel.max_features])?.build(&sel.model)?;
    let name = sel.model.clone();
    let trace = with_threads(config.threads, || {
        forward_select(
            &pool,
            |subset: &[String]| base.with_features(subset)?.build(&name),
            &frame,
            &plan,
            sel.protocol,
            sel.max_features,
        )
    })??;
    create_dir(&config.paths.out)?;
    let json = config.paths.out.join(format!("selection_{}.json", sel.model));
    write_json(&json, &trace)?;
    let csv = config.paths.out.join(format!("selection_{}.csv", sel.model));
    let mut text = String::from("# forward selection: out-of-sample MSE on log-RV after each added feature\nstep,feature,mse\n");
    for (i, (f, m)) in trace.selected.iter().zip(&trace.mse).enumerate() {
        text.push_str(&format!("{},{f},{}\n", i + 1, fmt_f64(*m)));
    }
    write_text(&csv, &text)?;
    write_manifest(config, "select", &frame_path, frame.len(), &[json, csv])?;
    Ok(trace)
}

/// Shapley attribution of the final-window quantum model's last forecast.
pub fn shapley(config: &RunConfig) -> Result<ShapleyReport> {
    config.validate()?;
    let frame_path = config.frame_path();
    let frame = load_frame(&frame_path)?;
    let plan = config.plan_for(&frame)?;
    let sc = &config.shapley;
    let (features, reservoir) = match config.model(&sc.model)? {
        ModelSpec::Quantum { features, reservoir } => (features.clone(), reservoir.clone()),
        _ => {
            return Err(Error::Config(format!(
                "Shapley attribution works on quantum models; {} is not one",
                sc.model
            )))
        }
    };
    let k = reservoir.lag_depth;
    let window = plan.windows().pop().expect("plan has windows");
    let report = with_threads(config.threads, || -> Result<ShapleyReport> {
        let model = QuantumForecaster::new(sc.model.clone(), features.clone(), reservoir)?;
        let fitted = model.fit_quantum(&frame, window.train.clone())?;
        let flat = |t: usize| -> Result<Vec<f64>> { Ok(fitted.lag_grid(&frame, t)?.concat()) };
        let explained = flat(window.target)?;
        let background: Vec<Vec<f64>> = (window.train.start + k..window.train.end)
            .map(flat)
            .collect::<Result<_>>()?;
        let grouping = Grouping::for_lag_grid(sc.grouping, &features, k);
        let n = features.len();
        let f = |x: &[f64]| fitted.predict_grid(&x.chunks(n).collect::<Vec<_>>());
        shapley_values(f, &explained, &background, &grouping, sc.n_samples, config.seed)
    })??;
    create_dir(&config.paths.out)?;
    let stem = format!("shapley_{}_{}", sc.model, serde_json::to_value(sc.grouping)?.as_str().unwrap_or("grouping"));
    let json = config.paths.out.join(format!("{stem}.json"));
    write_json(&json, &report)?;
    let csv = config.paths.out.join(format!("{stem}.csv"));
    let mut text = format!(
        "# Shapley values of the log-RV forecast for {}; efficiency residual {}\ngroup,phi,std_error\n",
        frame.months()[window.target],
        fmt_f64(report.efficiency_residual)
    );
    for ((g, v), s) in report.groups.iter().zip(&report.values).zip(&report.std_errors) {
        text.push_str(&format!("{g},{},{}\n", fmt_f64(*v), fmt_f64(*s)));
    }
    write_text(&csv, &text)?;
    write_manifest(config, "shapley", &frame_path, frame.len(), &[json, csv])?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_round_trips_through_toml() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        let text = cfg.to_toml().unwrap();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash().unwrap(), cfg.hash().unwrap());
    }

    #[test]
    fn enabled_model_without_block_is_a_config_error() {
        let mut cfg = RunConfig::default();
        cfg.enabled.push("LSTM".into());
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn quantum_subset_larger_than_register() {
        let spec = &RunConfig::default().models["QR1"];
        let eleven: Vec<String> = FRAME_COLUMNS[..11].iter().map(|s| s.to_string()).collect();
        assert!(matches!(spec.with_features(&eleven), Err(Error::Config(_))));
        let ok = spec.with_features(&eleven[..4]).unwrap();
        match ok {
            ModelSpec::Quantum { reservoir, .. } => assert_eq!((reservoir.n_input, reservoir.n_hidden), (4, 6)),
            _ => unreachable!(),
        }
    }
}
