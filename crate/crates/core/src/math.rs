//! Small numerical helpers shared by the distribution, density and EM code.

/// Table of `ln n!` for `n = 0..=n_max`, built by running sums of `ln k`.
pub fn ln_factorials(n_max: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(n_max + 1);
    let mut acc = 0.0;
    table.push(0.0);
    for k in 1..=n_max {
        acc += (k as f64).ln();
        table.push(acc);
    }
    table
}

/// `ln C(m, n)` from a factorial table. Requires `n <= m < table.len()`.
#[inline]
pub fn ln_binomial(ln_fact: &[f64], m: usize, n: usize) -> f64 {
    ln_fact[m] - ln_fact[n] - ln_fact[m - n]
}

/// `ln Σ exp(x)`, returning `-inf` for an empty slice or all `-inf` inputs.
pub fn logsumexp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    let s: f64 = xs.iter().map(|&x| (x - m).exp()).sum();
    m + s.ln()
}

/// `n · ln z` with the convention `0 · ln 0 = 0`.
#[inline]
pub fn n_ln_z(n: usize, ln_z: f64) -> f64 {
    if n == 0 {
        0.0
    } else {
        n as f64 * ln_z
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance. Returns 0 for fewer than two values.
pub fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}
