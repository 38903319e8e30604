//! Greedy forward feature selection and Shapley attributions over lag grids.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::backtest::{run_backtest, Forecaster, Protocol};
use crate::dataset::{FeatureFrame, RollingPlan};
use crate::error::{Error, Result};

/// Group counts up to this use exact coalition enumeration.
pub const EXACT_MAX_GROUPS: usize = 5;
pub const DEFAULT_SHAPLEY_SAMPLES: usize = 2000;
pub const MIN_SHAPLEY_SAMPLES: usize = 100;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeaturePool {
    names: Vec<String>,
}

impl FeaturePool {
    pub fn new(names: Vec<String>) -> Result<Self> {
        let mut seen = HashSet::new();
        for n in &names {
            if !seen.insert(n) {
                return Err(Error::Config(format!("feature {n} appears twice in the pool")));
            }
            FeatureFrame::column_index(n)?;
        }
        if names.is_empty() {
            return Err(Error::Config("feature pool is empty".into()));
        }
        Ok(Self { names })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    MaxFeatures,
    PoolExhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionTrace {
    pub selected: Vec<String>,
    /// Out-of-sample MSE after each addition.
    pub mse: Vec<f64>,
    /// Every candidate's MSE, per round, in pool order.
    pub candidates: Vec<Vec<(String, f64)>>,
    pub stop_reason: StopReason,
}

/// Adds, one at a time, the pool feature whose inclusion gives the lowest
/// backtest MSE. Ties go to the feature listed first in the pool.
pub fn forward_select<F>(
    pool: &FeaturePool,
    factory: F,
    frame: &FeatureFrame,
    plan: &RollingPlan,
    protocol: Protocol,
    max_features: usize,
) -> Result<SelectionTrace>
where
    F: Fn(&[String]) -> Result<Box<dyn Forecaster>> + Sync,
{
    if max_features == 0 || max_features > pool.names.len() {
        return Err(Error::Config(format!(
            "max_features = {max_features} must lie in 1..={}",
            pool.names.len()
        )));
    }
    let mut selected: Vec<String> = Vec::new();
    let mut mse = Vec::new();
    let mut rounds = Vec::new();
    while selected.len() < max_features {
        let remaining: Vec<&String> = pool.names.iter().filter(|n| !selected.contains(n)).collect();
        let scores: Vec<(String, f64)> = remaining
            .par_iter()
            .map(|name| {
                let mut subset = selected.clone();
                subset.push((*name).clone());
                let model = factory(&subset)?;
                let run = run_backtest(model.as_ref(), frame, plan, protocol)?;
                Ok(((*name).clone(), run.mse()?))
            })
            .collect::<Result<_>>()?;
        let best = scores
            .iter()
            .enumerate()
            .fold(0, |b, (i, s)| if s.1 < scores[b].1 { i } else { b });
        log::info!("selection round {}: {} (MSE {:.6})", selected.len() + 1, scores[best].0, scores[best].1);
        selected.push(scores[best].0.clone());
        mse.push(scores[best].1);
        rounds.push(scores);
    }
    let stop_reason = if selected.len() == pool.names.len() {
        StopReason::PoolExhausted
    } else {
        StopReason::MaxFeatures
    };
    Ok(SelectionTrace {
        selected,
        mse,
        candidates: rounds,
        stop_reason,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupingStrategy {
    /// Every (feature, lag) cell on its own.
    PerLagFeature,
    /// All lags of a feature together.
    FeatureFamily,
    /// All features at one lag together.
    TimeLag,
}

/// A partition of flattened input positions into named groups.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grouping {
    pub strategy: Option<GroupingStrategy>,
    pub names: Vec<String>,
    pub members: Vec<Vec<usize>>,
}

impl Grouping {
    /// `members` must cover `0..n_inputs` exactly once.
    pub fn new(names: Vec<String>, members: Vec<Vec<usize>>, n_inputs: usize) -> Result<Self> {
        if names.len() != members.len() || names.is_empty() {
            return Err(Error::Config("each group needs a name".into()));
        }
        let mut seen = vec![false; n_inputs];
        for m in members.iter().flatten() {
            if *m >= n_inputs || seen[*m] {
                return Err(Error::Config(format!("input {m} is out of range or in two groups")));
            }
            seen[*m] = true;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::Config(format!("input {i} belongs to no group")));
        }
        if members.iter().any(Vec::is_empty) {
            return Err(Error::Config("groups must be non-empty".into()));
        }
        Ok(Self {
            strategy: None,
            names,
            members,
        })
    }

    /// Groups over a `k × n` lag grid flattened row-major, oldest lag first.
    pub fn for_lag_grid(strategy: GroupingStrategy, features: &[String], k: usize) -> Self {
        let n = features.len();
        let lag_name = |l: usize| format!("t-{}", k - l);
        let (names, members) = match strategy {
            GroupingStrategy::PerLagFeature => (0..k)
                .flat_map(|l| features.iter().enumerate().map(move |(j, f)| (l, j, f)))
                .map(|(l, j, f)| (format!("{f}({})", lag_name(l)), vec![l * n + j]))
                .unzip(),
            GroupingStrategy::FeatureFamily => features
                .iter()
                .enumerate()
                .map(|(j, f)| (f.clone(), (0..k).map(|l| l * n + j).collect()))
                .unzip(),
            GroupingStrategy::TimeLag => (0..k)
                .map(|l| (lag_name(l), (0..n).map(|j| l * n + j).collect()))
                .unzip(),
        };
        Self {
            strategy: Some(strategy),
            names,
            members,
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapleyReport {
    pub grouping: Option<GroupingStrategy>,
    pub groups: Vec<String>,
    pub values: Vec<f64>,
    /// Monte-Carlo standard errors; zero under exact enumeration.
    pub std_errors: Vec<f64>,
    pub exact: bool,
    pub n_samples: usize,
    pub seed: u64,
    pub prediction: f64,
    /// Mean prediction over the background rows.
    pub baseline: f64,
    /// `Σφ − (prediction − baseline)`.
    pub efficiency_residual: f64,
}

fn mix(x: &[f64], background: &[f64], members: &[Vec<usize>], take: impl Fn(usize) -> bool) -> Vec<f64> {
    let mut z = background.to_vec();
    for (g, m) in members.iter().enumerate() {
        if take(g) {
            for &i in m {
                z[i] = x[i];
            }
        }
    }
    z
}

/// Shapley values of `grouping` for `f` at `explained` against `background`.
/// Uses exact coalition enumeration for at most [`EXACT_MAX_GROUPS`] groups
/// and permutation sampling (one random background row per draw) otherwise.
pub fn shapley_values<F>(
    f: F,
    explained: &[f64],
    background: &[Vec<f64>],
    grouping: &Grouping,
    n_samples: usize,
    seed: u64,
) -> Result<ShapleyReport>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let d = explained.len();
    Grouping::new(grouping.names.clone(), grouping.members.clone(), d)?;
    if n_samples < MIN_SHAPLEY_SAMPLES {
        return Err(Error::Config(format!("Shapley needs at least {MIN_SHAPLEY_SAMPLES} samples")));
    }
    if background.is_empty() || background.iter().any(|b| b.len() != d) {
        return Err(Error::Argument("background rows must be non-empty and match the explained row".into()));
    }
    let g = grouping.len();
    let prediction = f(explained)?;
    let base_preds: Vec<f64> = background.par_iter().map(|b| f(b)).collect::<Result<_>>()?;
    let baseline = base_preds.iter().sum::<f64>() / base_preds.len() as f64;

    let (values, std_errors, exact) = if g <= EXACT_MAX_GROUPS {
        let n_coal = 1usize << g;
        let mut v = vec![0.0; n_coal];
        v[0] = baseline;
        for (s, value) in v.iter_mut().enumerate().skip(1) {
            let preds: Vec<f64> = background
                .par_iter()
                .map(|b| f(&mix(explained, b, &grouping.members, |k| s >> k & 1 == 1)))
                .collect::<Result<_>>()?;
            *value = preds.iter().sum::<f64>() / preds.len() as f64;
        }
        let fact = |n: usize| (1..=n).map(|i| i as f64).product::<f64>();
        let phi = (0..g)
            .map(|k| {
                (0..n_coal)
                    .filter(|s| s >> k & 1 == 0)
                    .map(|s| {
                        let size = s.count_ones() as usize;
                        fact(size) * fact(g - size - 1) / fact(g) * (v[s | 1 << k] - v[s])
                    })
                    .sum()
            })
            .collect();
        (phi, vec![0.0; g], true)
    } else {
        let draws: Vec<Vec<f64>> = (0..n_samples as u64)
            .into_par_iter()
            .map(|draw| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(draw);
                let mut order: Vec<usize> = (0..g).collect();
                order.shuffle(&mut rng);
                let mut z = background[rng.gen_range(0..background.len())].clone();
                let mut prev = f(&z)?;
                let mut contrib = vec![0.0; g];
                for &k in &order {
                    for &i in &grouping.members[k] {
                        z[i] = explained[i];
                    }
                    let cur = f(&z)?;
                    contrib[k] = cur - prev;
                    prev = cur;
                }
                Ok(contrib)
            })
            .collect::<Result<_>>()?;
        let n = draws.len() as f64;
        let mean: Vec<f64> = (0..g).map(|k| draws.iter().map(|c| c[k]).sum::<f64>() / n).collect();
        let se = (0..g)
            .map(|k| {
                let var = draws.iter().map(|c| (c[k] - mean[k]).powi(2)).sum::<f64>() / (n - 1.0);
                (var / n).sqrt()
            })
            .collect();
        (mean, se, false)
    };
    let efficiency_residual = values.iter().sum::<f64>() - (prediction - baseline);
    Ok(ShapleyReport {
        grouping: grouping.strategy,
        groups: grouping.names.clone(),
        values,
        std_errors,
        exact,
        n_samples,
        seed,
        prediction,
        baseline,
        efficiency_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lag_grid_groupings() {
        let feats = vec!["RV".to_string(), "MKT".to_string()];
        let t = Grouping::for_lag_grid(GroupingStrategy::TimeLag, &feats, 3);
        assert_eq!(t.names, vec!["t-3", "t-2", "t-1"]);
        assert_eq!(t.members[2], vec![4, 5]);
        let f = Grouping::for_lag_grid(GroupingStrategy::FeatureFamily, &feats, 3);
        assert_eq!(f.members[1], vec![1, 3, 5]);
        let p = Grouping::for_lag_grid(GroupingStrategy::PerLagFeature, &feats, 3);
        assert_eq!(p.len(), 6);
        assert_eq!(p.names[5], "MKT(t-1)");
    }

    #[test]
    fn partition_is_checked() {
        assert!(Grouping::new(vec!["a".into(), "b".into()], vec![vec![0], vec![0, 1]], 2).is_err());
        assert!(Grouping::new(vec!["a".into()], vec![vec![0]], 2).is_err());
        assert!(Grouping::new(vec!["a".into(), "b".into()], vec![vec![1], vec![0]], 2).is_ok());
    }

    #[test]
    fn exact_product_game_splits_interaction_evenly() {
        let f = |x: &[f64]| Ok(x[0] * x[1]);
        let g = Grouping::new(vec!["a".into(), "b".into()], vec![vec![0], vec![1]], 2).unwrap();
        let r = shapley_values(f, &[1.0, 1.0], &[vec![0.0, 0.0]], &g, 100, 0).unwrap();
        assert!(r.exact);
        assert!((r.values[0] - 0.5).abs() < 1e-12 && (r.values[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sample_floor() {
        let g = Grouping::new(vec!["a".into()], vec![vec![0]], 1).unwrap();
        assert!(matches!(
            shapley_values(|x| Ok(x[0]), &[1.0], &[vec![0.0]], &g, 99, 0),
            Err(Error::Config(_))
        ));
    }
}
