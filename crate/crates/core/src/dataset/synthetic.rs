//! Seeded synthetic market: daily returns plus a macro-financial feature table
//! whose lagged values drive monthly log volatility.

use chrono::{Datelike, Weekday};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::frame::{assemble_frame, ExogenousFrame, PreparedFrame, EXOGENOUS};
use super::month::Month;
use super::returns::{compute_monthly_log_rv, DailyReturns};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// (mean, AR coefficient, innovation sd) for each exogenous series, in
/// [`EXOGENOUS`] order.
const EXO_DYNAMICS: [(f64, f64, f64); 10] = [
    (-3.5, 0.98, 0.05),
    (-2.8, 0.97, 0.08),
    (0.006, 0.1, 0.045),
    (0.003, 0.15, 0.03),
    (0.002, 0.1, 0.03),
    (0.005, 0.05, 0.04),
    (0.04, 0.99, 0.003),
    (0.003, 0.6, 0.003),
    (0.01, 0.95, 0.001),
    (0.002, 0.3, 0.008),
];

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticSpec {
    pub start: Month,
    pub n_months: usize,
    pub seed: u64,
    /// Unconditional mean of monthly log-RV.
    pub mean_log_rv: f64,
    /// AR coefficients on log-RV lags 1..3.
    pub ar: [f64; 3],
    /// Loadings on the standardized lag-1 exogenous series, in [`EXOGENOUS`] order.
    pub exo_loadings: [f64; 10],
    pub noise_sd: f64,
}

impl SyntheticSpec {
    /// 815 months starting February 1950.
    pub fn long_history(seed: u64) -> Self {
        Self {
            start: Month::new(1950, 2).expect("valid month"),
            n_months: 815,
            seed,
            mean_log_rv: -3.7,
            ar: [0.45, 0.2, 0.1],
            exo_loadings: [0.03, 0.0, -0.08, 0.0, 0.0, -0.05, 0.02, 0.0, 0.06, -0.03],
            noise_sd: 0.3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SyntheticMarket {
    pub daily: DailyReturns,
    pub features: ExogenousFrame,
    /// Log-RV that generated `daily`, one value per month.
    pub latent_log_rv: Vec<f64>,
}

impl SyntheticMarket {
    pub fn generate(spec: &SyntheticSpec) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let burn = 120;
        let n = spec.n_months + burn;
        let mut exo = vec![vec![0.0; n]; EXOGENOUS.len()];
        for (j, &(mu, phi, sd)) in EXO_DYNAMICS.iter().enumerate() {
            let mut x = mu;
            for slot in exo[j].iter_mut() {
                let e: f64 = StandardNormal.sample(&mut rng);
                x = mu + phi * (x - mu) + sd * e;
                *slot = x;
            }
        }
        let exo_sd: Vec<f64> = EXO_DYNAMICS
            .iter()
            .map(|&(_, phi, sd)| sd / (1.0 - phi * phi).sqrt())
            .collect();
        let mut y = vec![spec.mean_log_rv; n];
        let persistence: f64 = spec.ar.iter().sum();
        for t in 3..n {
            let mut v = spec.mean_log_rv * (1.0 - persistence);
            for (i, a) in spec.ar.iter().enumerate() {
                v += a * y[t - 1 - i];
            }
            for j in 0..EXOGENOUS.len() {
                let z = (exo[j][t - 1] - EXO_DYNAMICS[j].0) / exo_sd[j];
                v += spec.exo_loadings[j] * z;
            }
            let e: f64 = StandardNormal.sample(&mut rng);
            y[t] = v + spec.noise_sd * e;
        }

        let mut records = Vec::new();
        let months: Vec<Month> = (0..spec.n_months).map(|i| spec.start.offset(i as i32)).collect();
        for (i, m) in months.iter().enumerate() {
            let days: Vec<_> = m
                .first_day()
                .iter_days()
                .take_while(|d| d.month() == m.month())
                .filter(|d| !matches!(d.weekday(), Weekday::Sat | Weekday::Sun))
                .collect();
            let z: Vec<f64> = days.iter().map(|_| StandardNormal.sample(&mut rng)).collect();
            let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
            let scale = y[burn + i].exp() / norm;
            records.extend(days.into_iter().zip(z).map(|(d, v)| (d, v * scale)));
        }
        let features = ExogenousFrame::new(
            months,
            exo.iter().map(|c| c[burn..].to_vec()).collect(),
        )?;
        Ok(Self {
            daily: DailyReturns::new(records)?,
            features,
            latent_log_rv: y[burn..].to_vec(),
        })
    }

    /// Runs the daily-returns pipeline and joins the feature table.
    pub fn prepare(&self) -> Result<PreparedFrame> {
        let rv = compute_monthly_log_rv(&self.daily)?;
        assemble_frame(&rv, &self.features)
    }

    /// Writes `daily_returns.csv` and `features.csv` into `dir`.
    pub fn write_inputs(&self, dir: impl AsRef<Path>) -> Result<(PathBuf, PathBuf)> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let daily = dir.join("daily_returns.csv");
        let features = dir.join("features.csv");
        self.daily.write_csv(&daily)?;
        self.features.write_csv(&features)?;
        Ok((daily, features))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn long_history_has_815_rows_and_exact_rv() {
        let market = SyntheticMarket::generate(&SyntheticSpec::long_history(7)).unwrap();
        let frame = market.prepare().unwrap().frame;
        assert_eq!(frame.len(), 815);
        assert_eq!(frame.months()[0].to_string(), "1950-02-01");
        assert_eq!(frame.months()[814].to_string(), "2017-12-01");
        for (a, b) in frame.log_rv().iter().zip(&market.latent_log_rv) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn seeded() {
        let a = SyntheticMarket::generate(&SyntheticSpec::long_history(1)).unwrap();
        let b = SyntheticMarket::generate(&SyntheticSpec::long_history(1)).unwrap();
        let c = SyntheticMarket::generate(&SyntheticSpec::long_history(2)).unwrap();
        assert_eq!(a.daily, b.daily);
        assert_ne!(a.daily, c.daily);
    }

    #[test]
    fn written_inputs_reload_to_the_same_frame() {
        let market = SyntheticMarket::generate(&SyntheticSpec {
            n_months: 40,
            ..SyntheticSpec::long_history(3)
        })
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let (daily, features) = market.write_inputs(dir.path()).unwrap();
        let rv = compute_monthly_log_rv(&super::super::load_daily(daily).unwrap()).unwrap();
        let exo = super::super::load_features(features).unwrap();
        let frame = assemble_frame(&rv, &exo).unwrap().frame;
        assert_eq!(frame, market.prepare().unwrap().frame);
    }
}
