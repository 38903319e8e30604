use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use qrc_vol::dataset::{SyntheticMarket, SyntheticSpec, EXOGENOUS, RV};
use qrc_vol::econ::LinearSpec;
use qrc_vol::explain::GroupingStrategy;
use qrc_vol::pipeline::{benchmark, prepare, select, shapley, ModelSpec, RunConfig};
use qrc_vol::qrc::QuantumReservoirConfig;
use qrc_vol::Error;

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// Writes synthetic inputs, prepares the frame and returns a config pointing at it.
fn setup(dir: &Path, spec: SyntheticSpec) -> RunConfig {
    let market = SyntheticMarket::generate(&spec).unwrap();
    let (d, f) = market.write_inputs(dir.join("inputs")).unwrap();
    let mut cfg = RunConfig::default();
    cfg.paths.daily_returns = Some(d);
    cfg.paths.features = Some(f);
    cfg.paths.out = dir.join("out");
    cfg.evaluation.n_reps = 200;
    prepare(&cfg).unwrap();
    cfg
}

fn read_tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(p) = stack.pop() {
        for e in std::fs::read_dir(&p).unwrap() {
            let path = e.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(path.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&path).unwrap());
            }
        }
    }
    out
}

#[test]
fn ar3_beats_ar1_on_ar3_data() {
    let mut wins = 0;
    for seed in 0..10 {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = setup(
            dir.path(),
            SyntheticSpec {
                exo_loadings: [0.0; 10],
                ar: [0.3, 0.2, 0.35],
                ..SyntheticSpec::long_history(100 + seed)
            },
        );
        cfg.enabled = names(&["AR1", "AR3"]);
        let out = benchmark(&cfg).unwrap();
        let report = out.report.unwrap();
        if report.mse[1] <= report.mse[0] {
            wins += 1;
        }
    }
    assert!(wins >= 9, "AR3 won {wins} of 10");
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = setup(dir.path(), SyntheticSpec { n_months: 200, ..SyntheticSpec::long_history(1) });
    cfg.plan.n_out_of_sample = 30;
    cfg.enabled = names(&["HAR", "AR3", "ARMAX", "RC", "RCX"]);
    cfg.paths.frame = Some(dir.path().join("out/frame.csv"));

    let mut trees = Vec::new();
    for (run, threads) in [(0, 1), (1, 2), (2, 1)] {
        let mut c = cfg.clone();
        c.threads = Some(threads);
        c.paths.out = dir.path().join(format!("run{run}"));
        let out = benchmark(&c).unwrap();
        assert_eq!(out.exit_code(), 0);
        let mut tree = read_tree(&c.paths.out);
        assert!(tree.remove(Path::new("timings.json")).is_some());
        let manifest = tree.remove(Path::new("manifest_benchmark.json")).unwrap();
        let json: serde_json::Value = serde_json::from_slice(&manifest).unwrap();
        trees.push((tree, json["artifacts"].clone(), manifest));
    }
    assert_eq!(trees[0].0, trees[1].0);
    assert_eq!(trees[0].1, trees[1].1);
    for name in ["table_mcs.csv", "table_dm_mse.csv", "table_dm_qlike.csv", "summary.txt", "forecasts/RC.csv"] {
        assert!(trees[0].0.contains_key(Path::new(name)), "{name} missing");
    }

    // Same config, same out path: the manifest itself repeats.
    let mut c = cfg.clone();
    c.threads = Some(1);
    c.paths.out = dir.path().join("run0");
    benchmark(&c).unwrap();
    let again = std::fs::read(c.paths.out.join("manifest_benchmark.json")).unwrap();
    assert_eq!(again, trees[0].2);
}

#[test]
fn one_failing_model_does_not_stop_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = setup(dir.path(), SyntheticSpec { n_months: 200, ..SyntheticSpec::long_history(2) });
    cfg.plan.n_out_of_sample = 24;
    // AR(180) needs more history than the 176-month training window holds.
    cfg.models.insert("AR180".into(), ModelSpec::Linear { spec: LinearSpec::ar(180) });
    cfg.enabled = names(&["HAR", "AR180", "AR1"]);
    let out = benchmark(&cfg).unwrap();
    assert_eq!(out.exit_code(), 4);
    assert_eq!(out.failures.len(), 1);
    assert_eq!(out.failures[0].0, "AR180");
    assert_eq!(out.runs.len(), 2);
    let report = out.report.unwrap();
    assert_eq!(report.models, names(&["HAR", "AR1"]));
    let summary = std::fs::read_to_string(cfg.paths.out.join("summary.txt")).unwrap();
    assert!(summary.contains("FAILED AR180"));
    let table = std::fs::read_to_string(cfg.paths.out.join("table_mcs.csv")).unwrap();
    assert!(table.starts_with("# loss space"));
    assert!(table.contains("P_MCS_MSE") && table.contains("P_MCS_QLIKE"));
}

#[test]
fn config_problems_map_to_exit_code_three() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.toml");
    std::fs::write(&p, "enabled = [\"AR1\"]\nunknown_key = 1\n").unwrap();
    let e = RunConfig::from_file(&p).unwrap_err();
    assert!(matches!(e, Error::Config(_)));
    assert_eq!(e.exit_code(), 3);

    std::fs::write(&p, "enabled = [\"QR1\"]\n[models.QR1]\nfamily = \"quantum\"\nfeatures = [\"RV\"]\n").unwrap();
    assert_eq!(RunConfig::from_file(&p).unwrap_err().exit_code(), 3);

    std::fs::write(&p, "enabled = [\"LSTM\"]\n").unwrap();
    let e = RunConfig::from_file(&p).unwrap_err();
    assert!(e.to_string().contains("LSTM"), "{e}");

    std::fs::write(&p, "[paths]\nout = \"results\"\nframe = \"data/frame.csv\"\n").unwrap();
    let ok = RunConfig::from_file(&p).unwrap();
    assert_eq!(ok.paths.out, dir.path().join("results"));
    assert_eq!(ok.frame_path(), dir.path().join("data/frame.csv"));
    let missing = benchmark(&ok).unwrap_err();
    assert_eq!(missing.exit_code(), 2);
}

#[test]
fn selection_over_eleven_features_stops_at_ten() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = setup(dir.path(), SyntheticSpec { n_months: 160, ..SyntheticSpec::long_history(3) });
    cfg.plan.n_out_of_sample = 12;
    let mut pool = vec![RV];
    pool.extend(EXOGENOUS);
    cfg.selection.pool = names(&pool);
    cfg.selection.model = "HARX".into();
    cfg.selection.max_features = 10;
    let trace = select(&cfg).unwrap();
    assert_eq!(trace.selected.len(), 10);
    let csv = std::fs::read_to_string(cfg.paths.out.join("selection_HARX.csv")).unwrap();
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 11);

    cfg.selection.model = "AR1".into();
    assert!(matches!(select(&cfg), Err(Error::Config(_))));
    cfg.selection.model = "QR1".into();
    cfg.selection.max_features = 11;
    assert!(matches!(select(&cfg), Err(Error::Config(_))));
}

fn small_quantum(cfg: &mut RunConfig) {
    cfg.models.insert(
        "QRS".into(),
        ModelSpec::Quantum {
            features: names(&["RV", "MKT", "DEF"]),
            reservoir: QuantumReservoirConfig {
                n_input: 3,
                n_hidden: 3,
                ..Default::default()
            },
        },
    );
    cfg.shapley.model = "QRS".into();
}

#[test]
fn shapley_by_time_lag_gives_one_value_per_lag() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = setup(dir.path(), SyntheticSpec { n_months: 120, ..SyntheticSpec::long_history(4) });
    cfg.plan.n_out_of_sample = 12;
    small_quantum(&mut cfg);
    cfg.shapley.grouping = GroupingStrategy::TimeLag;
    let r = shapley(&cfg).unwrap();
    assert_eq!(r.values.len(), 3);
    assert!(r.exact);
    assert!(r.efficiency_residual.abs() < 1e-10);
    let csv = std::fs::read_to_string(cfg.paths.out.join("shapley_QRS_time-lag.csv")).unwrap();
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 4);

    cfg.shapley.model = "HAR".into();
    assert!(matches!(shapley(&cfg), Err(Error::Config(_))));
}

#[test]
fn more_shapley_samples_shrink_the_efficiency_residual() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = setup(dir.path(), SyntheticSpec { n_months: 120, ..SyntheticSpec::long_history(5) });
    cfg.plan.n_out_of_sample = 12;
    small_quantum(&mut cfg);
    cfg.shapley.grouping = GroupingStrategy::PerLagFeature;
    let mut mean_abs = Vec::new();
    for n in [100, 2000] {
        cfg.shapley.n_samples = n;
        let mut total = 0.0;
        for seed in 0..5 {
            cfg.seed = seed;
            let r = shapley(&cfg).unwrap();
            assert!(!r.exact);
            assert_eq!(r.values.len(), 9);
            total += r.efficiency_residual.abs();
        }
        mean_abs.push(total / 5.0);
    }
    println!("mean |efficiency residual|: 100 samples {:.3e}, 2000 samples {:.3e}", mean_abs[0], mean_abs[1]);
    assert!(mean_abs[1] < mean_abs[0]);
}
