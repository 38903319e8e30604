use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::loss::{check_aligned, LossSeries};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BootstrapConfig {
    pub n_reps: usize,
    pub block_length: usize,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            n_reps: 5000,
            block_length: 12,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McsResult {
    /// Models in input order.
    pub models: Vec<String>,
    /// MCS p-value of each model, aligned with `models`.
    pub p_values: Vec<f64>,
    /// Models whose p-value is at least `alpha`.
    pub survivors: Vec<String>,
    /// Eliminated models, first eliminated first. The final model is not listed.
    pub elimination_order: Vec<String>,
    pub alpha: f64,
}

impl McsResult {
    pub fn p_value(&self, model: &str) -> Option<f64> {
        self.models.iter().position(|m| m == model).map(|i| self.p_values[i])
    }
}

/// Circular block bootstrap indices for replication `rep`.
fn block_indices(t: usize, block: usize, seed: u64, rep: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    let mut idx = Vec::with_capacity(t + block);
    while idx.len() < t {
        let start = rng.gen_range(0..t);
        idx.extend((0..block).map(|k| (start + k) % t));
    }
    idx.truncate(t);
    idx
}

fn ratio(num: f64, var: f64) -> f64 {
    if var > 0.0 {
        num / var.sqrt()
    } else if num == 0.0 {
        0.0
    } else {
        f64::INFINITY.copysign(num)
    }
}

/// Model Confidence Set with the range statistic.
///
/// Each round studentizes every pairwise mean loss differential by its
/// bootstrap variance, takes the largest absolute value as the test
/// statistic, and compares it with the bootstrap distribution of the
/// recentred maximum. The model with the largest worst-case mean loss
/// differential is then eliminated. Rounds continue until one model is left;
/// p-values are running maxima over rounds and the last model gets 1.
pub fn mcs(losses: &[LossSeries], alpha: f64, bootstrap: BootstrapConfig) -> Result<McsResult> {
    if losses.len() < 2 {
        return Err(Error::Argument("MCS needs at least two models".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!("alpha {alpha} is outside (0, 1)")));
    }
    if bootstrap.n_reps < 100 {
        return Err(Error::Config(format!("MCS needs at least 100 bootstrap replications, got {}", bootstrap.n_reps)));
    }
    if bootstrap.block_length == 0 {
        return Err(Error::Config("bootstrap block length must be positive".into()));
    }
    check_aligned(&losses.iter().collect::<Vec<_>>())?;
    let m = losses.len();
    let t = losses[0].losses.len();
    let means: Vec<f64> = losses.iter().map(LossSeries::mean).collect();
    // Bootstrap mean loss of every model; the same resamples serve every round.
    let boot: Vec<Vec<f64>> = (0..bootstrap.n_reps as u64)
        .into_par_iter()
        .map(|rep| {
            let idx = block_indices(t, bootstrap.block_length, bootstrap.seed, rep);
            losses
                .iter()
                .map(|s| idx.iter().map(|&i| s.losses[i]).sum::<f64>() / t as f64)
                .collect()
        })
        .collect();
    let b = boot.len() as f64;
    let mut var = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..i {
            let d = means[i] - means[j];
            let v = boot.iter().map(|r| (r[i] - r[j] - d).powi(2)).sum::<f64>() / b;
            var[i][j] = v;
            var[j][i] = v;
        }
    }

    let mut alive: Vec<usize> = (0..m).collect();
    let mut p_values = vec![1.0; m];
    let mut order = Vec::new();
    let mut running = 0.0f64;
    while alive.len() > 1 {
        let mut stat = 0.0f64;
        for (a, &i) in alive.iter().enumerate() {
            for &j in &alive[..a] {
                stat = stat.max(ratio(means[i] - means[j], var[i][j]).abs());
            }
        }
        let exceed = boot
            .iter()
            .filter(|r| {
                let mut tb = 0.0f64;
                for (a, &i) in alive.iter().enumerate() {
                    for &j in &alive[..a] {
                        let centred = r[i] - r[j] - (means[i] - means[j]);
                        let v = ratio(centred, var[i][j]).abs();
                        if v.is_finite() {
                            tb = tb.max(v);
                        }
                    }
                }
                tb >= stat
            })
            .count();
        let p = exceed as f64 / b;
        running = running.max(p);
        // largest max_j (L̄_i − L̄_j) is the largest mean loss in the set
        let (pos, &worst) = alive
            .iter()
            .enumerate()
            .max_by(|x, y| means[*x.1].total_cmp(&means[*y.1]).then(y.0.cmp(&x.0)))
            .expect("non-empty set");
        p_values[worst] = running;
        order.push(worst);
        alive.remove(pos);
    }
    let models: Vec<String> = losses.iter().map(|s| s.model.clone()).collect();
    Ok(McsResult {
        survivors: (0..m).filter(|&i| p_values[i] >= alpha).map(|i| models[i].clone()).collect(),
        elimination_order: order.iter().map(|&i| models[i].clone()).collect(),
        p_values,
        models,
        alpha,
    })
}
