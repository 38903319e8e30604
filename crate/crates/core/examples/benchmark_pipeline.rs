//! The full command pipeline on synthetic inputs: prepare, then a benchmark of
//! the fast models. Swap in `configs/benchmark.toml` for the whole matrix.

use qrc_vol::dataset::{SyntheticMarket, SyntheticSpec};
use qrc_vol::pipeline::{benchmark, prepare, RunConfig};

fn main() -> qrc_vol::Result<()> {
    let out = std::env::temp_dir().join("qrc-vol-benchmark-example");
    let market = SyntheticMarket::generate(&SyntheticSpec::long_history(8))?;
    let (daily, features) = market.write_inputs(out.join("inputs"))?;

    let mut config = RunConfig::default();
    config.paths.daily_returns = Some(daily);
    config.paths.features = Some(features);
    config.paths.out = out.clone();
    config.enabled = ["HAR", "AR1", "AR3", "ARMAX"].iter().map(|s| s.to_string()).collect();
    config.evaluation.n_reps = 1000;

    let prepared = prepare(&config)?;
    println!("{}", prepared.summary);
    let result = benchmark(&config)?;
    print!("{}", result.summary);
    println!("exit code {}, artifacts in {}", result.exit_code(), out.display());
    Ok(())
}
