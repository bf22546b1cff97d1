//! Sample statistics used to validate simulated data: two-sample
//! Kolmogorov–Smirnov tests and bootstrap standard errors.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::seeded;

/// Outcome of a two-sample Kolmogorov–Smirnov test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsOutcome {
    pub statistic: f64,
    pub critical_value: f64,
    pub alpha: f64,
    pub passed: bool,
}

/// Two-sample KS statistic `sup |F_a − F_b|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Asymptotic critical value `c(α)·√((n+m)/(n·m))` with `c(α) = √(−ln(α/2)/2)`.
pub fn ks_critical_value(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    let (n, m) = (n as f64, m as f64);
    c * ((n + m) / (n * m)).sqrt()
}

/// Runs the two-sample KS test at level `alpha`.
pub fn ks_two_sample(a: &[f64], b: &[f64], alpha: f64) -> KsOutcome {
    let statistic = ks_statistic(a, b);
    let critical_value = ks_critical_value(a.len(), b.len(), alpha);
    KsOutcome {
        statistic,
        critical_value,
        alpha,
        passed: statistic < critical_value,
    }
}

/// Bootstrap standard error of `statistic` over `resamples` resamples with replacement.
pub fn bootstrap_standard_error<F>(data: &[f64], statistic: F, resamples: usize, seed: u64) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    let mut rng = seeded(seed);
    let mut buf = vec![0.0; data.len()];
    let values: Vec<f64> = (0..resamples)
        .map(|_| {
            for slot in buf.iter_mut() {
                *slot = data[rng.random_range(0..data.len())];
            }
            statistic(&buf)
        })
        .collect();
    crate::math::sample_variance(&values).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_statistic_small_cases() {
        assert_eq!(ks_statistic(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]), 0.0);
        assert_eq!(ks_statistic(&[1.0, 2.0], &[3.0, 4.0]), 1.0);
        // F_a jumps to 1/2 at 1, F_b stays 0 until 1.5
        assert!((ks_statistic(&[1.0, 2.0], &[1.5, 2.5]) - 0.5).abs() < 1e-15);
        // ties across samples
        assert_eq!(ks_statistic(&[1.0, 1.0, 2.0, 2.0], &[1.0, 2.0]), 0.0);
    }

    #[test]
    fn critical_value_matches_table() {
        // c(0.01) = 1.6276 for the asymptotic two-sample test
        let c = ks_critical_value(1, 1, 0.01) / 2f64.sqrt();
        assert!((c - 1.62762).abs() < 1e-4);
        let c05 = ks_critical_value(1, 1, 0.05) / 2f64.sqrt();
        assert!((c05 - 1.35810).abs() < 1e-4);
    }

    #[test]
    fn bootstrap_se_of_mean_is_close_to_analytic() {
        let data: Vec<f64> = (0..2000).map(|i| (i % 10) as f64).collect();
        let se = bootstrap_standard_error(&data, crate::math::mean, 400, 3);
        let analytic = (crate::math::sample_variance(&data) / data.len() as f64).sqrt();
        assert!(
            (se / analytic - 1.0).abs() < 0.15,
            "se={se} analytic={analytic}"
        );
    }
}
