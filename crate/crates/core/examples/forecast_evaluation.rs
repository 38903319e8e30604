//! Model confidence set and pairwise Diebold-Mariano tests on three loss series.

use qrc_vol::dataset::Month;
use qrc_vol::evaluation::{mcs, dm_test, default_nw_lag, BootstrapConfig, LossKind, LossSeries};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

fn main() -> qrc_vol::Result<()> {
    let n = 245;
    let start = Month::new(1997, 8)?;
    let dates: Vec<Month> = (0..n).map(|i| start.offset(i as i32)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut series = |name: &str, scale: f64| {
        let l = (0..n).map(|_| { let e: f64 = Exp1.sample(&mut rng); scale * e }).collect::<Vec<f64>>();
        LossSeries::new(name, LossKind::Mse, dates.clone(), l)
    };
    let losses = vec![series("good", 0.10)?, series("close", 0.105)?, series("bad", 0.20)?];

    let result = mcs(&losses, 0.05, BootstrapConfig { n_reps: 2000, ..Default::default() })?;
    for (m, p) in result.models.iter().zip(&result.p_values) {
        println!("{m:<6} mean {:.4}  P_MCS {p:.3}", losses.iter().find(|l| &l.model == m).unwrap().mean());
    }
    println!("survivors at 5%: {:?}", result.survivors);

    let lag = default_nw_lag(n);
    let dm = dm_test(&losses[0], &losses[2], lag)?;
    println!("DM good vs bad: stat {:+.3}, p {:.4} (Newey-West lag {lag})", dm.statistic, dm.p_value);
    Ok(())
}
