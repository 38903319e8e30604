use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::loss::{check_aligned, LossSeries};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DmResult {
    pub statistic: f64,
    pub p_value: f64,
    pub mean_loss_diff: f64,
    /// Long-run variance of the loss differential.
    pub nw_variance: f64,
}

/// `floor(1.5 · T^{1/3})`.
pub fn default_nw_lag(t: usize) -> usize {
    (1.5 * (t as f64).cbrt()).floor() as usize
}

/// Two-sided p-value of a standard normal statistic.
pub fn normal_two_sided_p(z: f64) -> f64 {
    if z.is_infinite() {
        return 0.0;
    }
    erfc(z.abs() / std::f64::consts::SQRT_2)
}

/// Bartlett-weighted long-run variance with autocovariances normalized by
/// `T - 1`, so lag 0 gives the sample variance.
pub fn newey_west_variance(d: &[f64], lag: usize) -> f64 {
    let t = d.len();
    let mean = d.iter().sum::<f64>() / t as f64;
    let dev: Vec<f64> = d.iter().map(|x| x - mean).collect();
    let gamma = |j: usize| dev[j..].iter().zip(&dev).map(|(a, b)| a * b).sum::<f64>() / (t - 1) as f64;
    let mut var = gamma(0);
    for j in 1..=lag.min(t - 1) {
        var += 2.0 * (1.0 - j as f64 / (lag + 1) as f64) * gamma(j);
    }
    var
}

/// Diebold–Mariano test on raw loss vectors; `d_t = a_t - b_t`.
pub fn dm_test_raw(a: &[f64], b: &[f64], nw_lag: usize) -> Result<DmResult> {
    if a.len() != b.len() {
        return Err(Error::Argument(format!("loss series lengths differ: {} vs {}", a.len(), b.len())));
    }
    if a.len() < 10 {
        return Err(Error::Argument(format!("DM test needs at least 10 dates, got {}", a.len())));
    }
    let t = a.len() as f64;
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = d.iter().sum::<f64>() / t;
    let scale = d.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let var = newey_west_variance(&d, nw_lag);
    // Relative threshold so rounding in the deviations does not fake a variance.
    let degenerate = var <= (1e-12 * scale).powi(2);
    let statistic = if degenerate {
        if mean.abs() <= 1e-12 * scale {
            0.0
        } else {
            f64::INFINITY.copysign(mean)
        }
    } else {
        mean / (var / t).sqrt()
    };
    Ok(DmResult {
        statistic,
        p_value: normal_two_sided_p(statistic),
        mean_loss_diff: mean,
        nw_variance: var.max(0.0),
    })
}

pub fn dm_test(loss_a: &LossSeries, loss_b: &LossSeries, nw_lag: usize) -> Result<DmResult> {
    check_aligned(&[loss_a, loss_b])?;
    dm_test_raw(&loss_a.losses, &loss_b.losses, nw_lag)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_losses() {
        let a: Vec<f64> = (0..20).map(|i| (i as f64).sin()).collect();
        let r = dm_test_raw(&a, &a, 3).unwrap();
        assert_eq!((r.statistic, r.p_value), (0.0, 1.0));
    }

    #[test]
    fn constant_differential() {
        let a = vec![2.0; 30];
        let b = vec![1.5; 30];
        let r = dm_test_raw(&a, &b, 3).unwrap();
        assert_eq!(r.statistic, f64::INFINITY);
        assert_eq!(r.p_value, 0.0);
        assert_eq!(dm_test_raw(&b, &a, 3).unwrap().statistic, f64::NEG_INFINITY);
    }

    #[test]
    fn lag_zero_is_t_statistic() {
        let a: Vec<f64> = (0..50).map(|i| ((i * 7 % 11) as f64).sqrt()).collect();
        let b: Vec<f64> = (0..50).map(|i| ((i * 3 % 5) as f64) * 0.4).collect();
        let d: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        let n = d.len() as f64;
        let m = d.iter().sum::<f64>() / n;
        let s2 = d.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        let t = m / (s2 / n).sqrt();
        let r = dm_test_raw(&a, &b, 0).unwrap();
        assert!((r.statistic - t).abs() < 1e-10);
    }

    #[test]
    fn short_series_rejected() {
        assert!(dm_test_raw(&[1.0; 9], &[0.0; 9], 1).is_err());
    }

    #[test]
    fn default_lag() {
        assert_eq!(default_nw_lag(245), 9);
    }
}
