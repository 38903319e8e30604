//! Generate a seeded synthetic market and write the two input CSVs.
//!
//! cargo run --example synthetic_market -- [out_dir] [seed]

use qrc_vol::dataset::{SyntheticMarket, SyntheticSpec};

fn main() -> qrc_vol::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = args.next().unwrap_or_else(|| "synthetic".into());
    let seed = args.next().map(|s| s.parse().expect("seed must be an integer")).unwrap_or(0);

    let market = SyntheticMarket::generate(&SyntheticSpec::long_history(seed))?;
    let (daily, features) = market.write_inputs(&dir)?;
    println!("{} daily returns -> {}", market.daily.len(), daily.display());
    println!("{} months of features -> {}", market.features.months().len(), features.display());
    Ok(())
}
