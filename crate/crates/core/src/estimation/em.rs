//! Expectation-maximization fit of the Gamma mixture `P_Z(z) = Σ_n p(n)·Gamma(n+1, 1)(z)`.
//!
//! E-step: responsibilities `p(n|z_k) ∝ p^t(n) e^{−z_k} z_kⁿ/n!`, computed in
//! log space with max-subtraction. M-step: `p^{t+1}(n) = (1/M) Σ_k p(n|z_k)`.
//!
//! Samples are processed in fixed chunks, possibly in parallel; per-chunk
//! partial sums are reduced sequentially in chunk order, so the result does
//! not depend on the thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::math::{ln_factorials, n_ln_z};
use crate::measurement::ZBatch;
use crate::states::PhotonDistribution;

/// Stop once the per-sample mean log-likelihood improves by less than this.
pub const DEFAULT_CONVERGENCE_TOL: f64 = 1e-5;
pub const DEFAULT_MAX_ITERATIONS: usize = 1000;
/// Cap on [`EMConfig::heuristic_n_max`].
pub const MAX_HEURISTIC_N_MAX: usize = 200;

const CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EMConfig {
    pub n_max: usize,
    pub max_iterations: usize,
    pub convergence_tol: f64,
    /// Initial estimate `p⁰(n)`; must be strictly positive.
    pub prior: PhotonDistribution,
}

impl EMConfig {
    /// Uniform prior over `0..=n_max` with default stopping rules.
    pub fn uniform(n_max: usize) -> Self {
        Self {
            n_max,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            convergence_tol: DEFAULT_CONVERGENCE_TOL,
            prior: PhotonDistribution::uniform(n_max),
        }
    }

    pub fn with_prior(prior: PhotonDistribution) -> Result<Self> {
        let config = Self {
            n_max: prior.n_max(),
            prior,
            ..Self::uniform(0)
        };
        config.validate()?;
        Ok(config)
    }

    /// `ceil(max z + 5·√max z)`, capped at [`MAX_HEURISTIC_N_MAX`].
    pub fn heuristic_n_max(batch: &ZBatch) -> usize {
        let zmax = batch.values().iter().copied().fold(0.0, f64::max);
        ((zmax + 5.0 * zmax.sqrt()).ceil() as usize).min(MAX_HEURISTIC_N_MAX)
    }

    pub fn validate(&self) -> Result<()> {
        if self.prior.n_max() != self.n_max {
            return Err(invalid(format!(
                "prior has n_max {} but config has {}",
                self.prior.n_max(),
                self.n_max
            )));
        }
        if let Some(n) = self
            .prior
            .probs()
            .iter()
            .position(|&p| !(p.is_finite() && p > 0.0))
        {
            return Err(invalid(format!(
                "prior component {n} is zero; EM can never revive it"
            )));
        }
        if self.max_iterations == 0 {
            return Err(invalid("max_iterations must be >= 1"));
        }
        if !(self.convergence_tol > 0.0 && self.convergence_tol.is_finite()) {
            return Err(invalid(format!(
                "convergence_tol must be > 0, got {}",
                self.convergence_tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EMResult {
    pub distribution: PhotonDistribution,
    /// Mean log-likelihood of the prior followed by that of every iterate.
    pub loglik_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Outcome of one pass over the data at fixed mixing weights.
struct Pass {
    /// Σ_k p(n|z_k)
    responsibility: Vec<f64>,
    loglik_sum: f64,
    /// First sample with zero mixture density.
    zero_density: Option<usize>,
}

struct Mixture<'a> {
    z: &'a [f64],
    ln_z: Vec<f64>,
    ln_fact: Vec<f64>,
}

impl<'a> Mixture<'a> {
    fn new(z: &'a [f64], n_max: usize) -> Self {
        Self {
            z,
            ln_z: z.iter().map(|v| v.ln()).collect(),
            ln_fact: ln_factorials(n_max),
        }
    }

    fn pass(&self, ln_p: &[f64]) -> Pass {
        let chunks = self.z.len().div_ceil(CHUNK);
        let partials: Vec<Pass> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let start = c * CHUNK;
                self.pass_chunk(start, CHUNK.min(self.z.len() - start), ln_p)
            })
            .collect();
        let mut total = Pass {
            responsibility: vec![0.0; ln_p.len()],
            loglik_sum: 0.0,
            zero_density: None,
        };
        for part in partials {
            for (acc, r) in total.responsibility.iter_mut().zip(&part.responsibility) {
                *acc += r;
            }
            total.loglik_sum += part.loglik_sum;
            total.zero_density = total.zero_density.or(part.zero_density);
        }
        total
    }

    fn pass_chunk(&self, start: usize, len: usize, ln_p: &[f64]) -> Pass {
        let mut out = Pass {
            responsibility: vec![0.0; ln_p.len()],
            loglik_sum: 0.0,
            zero_density: None,
        };
        let mut terms = vec![0.0; ln_p.len()];
        for k in start..start + len {
            let (z, ln_z) = (self.z[k], self.ln_z[k]);
            let mut max = f64::NEG_INFINITY;
            for (n, t) in terms.iter_mut().enumerate() {
                *t = ln_p[n] + n_ln_z(n, ln_z) - self.ln_fact[n] - z;
                max = max.max(*t);
            }
            if max == f64::NEG_INFINITY {
                out.zero_density.get_or_insert(k);
                continue;
            }
            let mut s = 0.0;
            for t in terms.iter_mut() {
                *t = (*t - max).exp();
                s += *t;
            }
            out.loglik_sum += max + s.ln();
            for (acc, t) in out.responsibility.iter_mut().zip(&terms) {
                *acc += t / s;
            }
        }
        out
    }
}

fn ln_probs(p: &[f64]) -> Vec<f64> {
    p.iter().map(|v| v.ln()).collect()
}

/// Mean log-likelihood `(1/M) Σ_k ln Σ_n p(n) e^{−z_k} z_kⁿ/n!`.
///
/// A sample with zero density under `dist` yields [`Error::ZeroLikelihood`].
pub fn loglikelihood(batch: &ZBatch, dist: &PhotonDistribution) -> Result<f64> {
    let mixture = Mixture::new(batch.values(), dist.n_max());
    let pass = mixture.pass(&ln_probs(dist.probs()));
    if let Some(index) = pass.zero_density {
        return Err(Error::ZeroLikelihood {
            index,
            z: batch.values()[index],
        });
    }
    Ok(pass.loglik_sum / batch.len() as f64)
}

/// Maximum-likelihood photon statistics from a `Z` record by EM.
pub fn em_reconstruct(batch: &ZBatch, config: &EMConfig) -> Result<EMResult> {
    config.validate()?;
    let z = batch.values();
    if let Some(i) = z.iter().position(|v| !(*v >= 0.0 && v.is_finite())) {
        return Err(invalid(format!(
            "z[{i}] = {} is not a finite nonnegative value",
            z[i]
        )));
    }
    let m = z.len() as f64;
    let mixture = Mixture::new(z, config.n_max);

    let evaluate = |p: &[f64], iteration: usize| -> Result<Pass> {
        let pass = mixture.pass(&ln_probs(p));
        if pass.zero_density.is_some() || !pass.loglik_sum.is_finite() {
            return Err(Error::NumericalFailure {
                iteration,
                detail: format!("log-likelihood is {}", pass.loglik_sum / m),
            });
        }
        Ok(pass)
    };

    let mut probs = config.prior.probs().to_vec();
    let mut pass = evaluate(&probs, 0)?;
    let mut trace = vec![pass.loglik_sum / m];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iterations {
        probs = pass.responsibility.iter().map(|r| r / m).collect();
        iterations += 1;
        pass = evaluate(&probs, iterations)?;
        let ll = pass.loglik_sum / m;
        let gain = ll - trace[trace.len() - 1];
        trace.push(ll);
        if gain < config.convergence_tol {
            converged = true;
            break;
        }
    }
    Ok(EMResult {
        distribution: PhotonDistribution::from_weights(probs)?,
        loglik_trace: trace,
        iterations,
        converged,
    })
}
