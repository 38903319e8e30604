use std::path::Path;

use chrono::NaiveDate;
use proptest::prelude::*;
use qrc_vol::dataset::{
    compute_monthly_log_rv, load_daily, load_features, AngleScaler, DailyReturns, RollingPlan, SyntheticMarket,
    SyntheticSpec, EXOGENOUS,
};
use qrc_vol::pipeline::{prepare, RunConfig};
use qrc_vol::Error;

fn config_for(dir: &Path, daily: &Path, features: &Path) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.paths.daily_returns = Some(daily.to_path_buf());
    cfg.paths.features = Some(features.to_path_buf());
    cfg.paths.out = dir.join("out");
    cfg
}

fn small_market(months: usize, seed: u64) -> SyntheticMarket {
    SyntheticMarket::generate(&SyntheticSpec {
        n_months: months,
        ..SyntheticSpec::long_history(seed)
    })
    .unwrap()
}

#[test]
fn prepare_builds_the_full_period_frame() {
    let dir = tempfile::tempdir().unwrap();
    let market = SyntheticMarket::generate(&SyntheticSpec::long_history(0)).unwrap();
    let (d, f) = market.write_inputs(dir.path()).unwrap();
    let out = prepare(&config_for(dir.path(), &d, &f)).unwrap();
    assert_eq!(out.rows, 815);
    assert!(out.summary.contains("1950-02-01 .. 2017-12-01"));
    let frame = qrc_vol::dataset::load_frame(&out.frame_path).unwrap();
    assert_eq!(frame, market.prepare().unwrap().frame);
}

#[test]
fn one_month_of_returns_gives_one_row_and_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let market = small_market(30, 1);
    let (_, f) = market.write_inputs(dir.path()).unwrap();
    let first: Vec<_> = market
        .daily
        .records()
        .iter()
        .copied()
        .filter(|(d, _)| *d < NaiveDate::from_ymd_opt(1950, 3, 1).unwrap())
        .collect();
    let d = dir.path().join("one_month.csv");
    DailyReturns::new(first).unwrap().write_csv(&d).unwrap();
    let out = prepare(&config_for(dir.path(), &d, &f)).unwrap();
    assert_eq!(out.rows, 1);
    assert!(out.warnings.iter().any(|w| w.contains("at least 13")), "{:?}", out.warnings);
}

#[test]
fn missing_def_column_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let market = small_market(20, 2);
    let (d, f) = market.write_inputs(dir.path()).unwrap();
    let text = std::fs::read_to_string(&f).unwrap();
    let def = EXOGENOUS.iter().position(|c| *c == "DEF").unwrap() + 1;
    let stripped: String = text
        .lines()
        .map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            let kept: Vec<&str> = cells.iter().enumerate().filter(|(i, _)| *i != def).map(|(_, c)| *c).collect();
            kept.join(",") + "\n"
        })
        .collect();
    std::fs::write(&f, stripped).unwrap();
    match prepare(&config_for(dir.path(), &d, &f)) {
        Err(e @ Error::Data(_)) => {
            assert!(e.to_string().contains("DEF"), "{e}");
            assert_eq!(e.exit_code(), 2);
        }
        other => panic!("expected a data error, got {other:?}"),
    }
}

#[test]
fn malformed_rows_are_reported_with_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("daily.csv");
    std::fs::write(&p, "date,return\n2001-01-02,0.01\n2001-01-03,abc\n2001-01-04,0.02\n").unwrap();
    let err = load_daily(&p).unwrap_err().to_string();
    assert!(err.contains("line 3"), "{err}");

    let q = dir.path().join("features.csv");
    let mut body = format!("date,{}\n", EXOGENOUS.join(","));
    for m in ["2001-01-01", "2001-03-01"] {
        body.push_str(&format!("{m},{}\n", ["0.1"; 10].join(",")));
    }
    std::fs::write(&q, body).unwrap();
    assert!(matches!(load_features(&q), Err(Error::Data(_))));
}

fn log_rv_oracle(returns: &[f64]) -> f64 {
    returns.iter().map(|r| r * r).sum::<f64>().sqrt().ln()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn log_rv_ignores_order_within_a_month(rets in prop::collection::vec(-0.05f64..0.05, 5..20), rot in 0usize..20) {
        prop_assume!(rets.iter().any(|r| r.abs() > 1e-6));
        let n = rets.len();
        let dates: Vec<NaiveDate> = (0..n).map(|i| NaiveDate::from_ymd_opt(2010, 3, 1 + i as u32).unwrap()).collect();
        let mut shuffled = rets.clone();
        shuffled.rotate_left(rot % n);
        shuffled.reverse();
        let a = compute_monthly_log_rv(&DailyReturns::new(dates.iter().copied().zip(rets.clone()).collect()).unwrap()).unwrap();
        let b = compute_monthly_log_rv(&DailyReturns::new(dates.iter().copied().zip(shuffled).collect()).unwrap()).unwrap();
        prop_assert_eq!(a.log_rv.len(), 1);
        prop_assert!((a.log_rv[0] - b.log_rv[0]).abs() <= 1e-12);
        prop_assert!((a.log_rv[0] - log_rv_oracle(&rets)).abs() <= 1e-12);
    }

    #[test]
    fn scaler_never_looks_past_its_span(
        col in prop::collection::vec(-10.0f64..10.0, 30),
        tail in prop::collection::vec(-100.0f64..100.0, 10),
        end in 2usize..30,
    ) {
        let fitted = AngleScaler::fit(&[&col], 0..end).unwrap();
        let mut changed = col.clone();
        for (i, v) in tail.iter().enumerate() {
            if end + i < changed.len() {
                changed[end + i] = *v;
            }
        }
        let refit = AngleScaler::fit(&[&changed], 0..end).unwrap();
        for t in 0..end {
            let a = fitted.transform(0, col[t]);
            prop_assert_eq!(a, refit.transform(0, changed[t]));
            prop_assert!(a.abs() <= std::f64::consts::PI);
            let (lo, hi) = fitted.bounds()[0];
            if hi > lo {
                prop_assert!((fitted.inverse(0, a) - col[t]).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn rolling_windows_cover_a_contiguous_target_block(extra in 0usize..200, oos in 1usize..300, k in 1usize..6) {
        let total = oos + k + 14 + extra;
        let plan = RollingPlan::new(total, oos, k).unwrap();
        let w = plan.windows();
        prop_assert_eq!(w.len(), oos);
        for (i, win) in w.iter().enumerate() {
            prop_assert_eq!(win.target, total - oos + i);
            prop_assert_eq!(win.train.end, win.target);
            prop_assert_eq!(win.train.len(), plan.window_width());
        }
    }
}

#[test]
fn plans_that_leave_too_little_history_are_rejected() {
    assert!(matches!(RollingPlan::new(100, 90, 3), Err(Error::Plan(_))));
}
